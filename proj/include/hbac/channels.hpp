// Kraus representations of the damping, compression and refresh strokes of
// the three-qubit cooling cycle.
//
// Register convention: |q1 q2 q3> with q1 the target qubit as the most
// significant index bit. A single-qubit state of polarization eps is
// diag(1 - eps, 1 + eps) / 2.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hbac/qmat.hpp"

namespace hbac {

inline constexpr std::size_t kState011 = 3;
inline constexpr std::size_t kState100 = 4;

template <class Real>
struct BasicKrausChannel {
  std::size_t dim = 0;
  std::vector<BasicMatrix<Real>> kraus_ops;
  std::string label;

  BasicKrausChannel() = default;
  BasicKrausChannel(std::size_t d, std::vector<BasicMatrix<Real>> ops, std::string name)
      : dim(d), kraus_ops(std::move(ops)), label(std::move(name)) {
    for (const auto& op : kraus_ops)
      if (op.rows() != dim || op.cols() != dim)
        throw std::invalid_argument("KrausChannel '" + label + "': operator is not " +
                                    std::to_string(dim) + "x" + std::to_string(dim));
  }
};

using KrausChannel = BasicKrausChannel<double>;

/// How the imperfect compression stroke is represented.
///  - RandomUnitary: sin^2(theta) U . U^dag + cos^2(theta) (.), manifestly CPTP.
///  - KrausUncorrected: the two-operator form {K1, K2} with the sign of the
///    |100><100| term in K2 as originally written; not trace preserving.
///  - KrausCorrected: same K1, K2 acting as cos(theta) on both |011> and |100>.
/// All three agree on the 011/100 population exchange of diagonal states,
/// except that KrausUncorrected leaks weight on the |100> population.
enum class CompressionVariant { RandomUnitary, KrausUncorrected, KrausCorrected };

inline std::string_view to_string(CompressionVariant v) {
  switch (v) {
    case CompressionVariant::RandomUnitary: return "random-unitary";
    case CompressionVariant::KrausUncorrected: return "kraus-uncorrected";
    case CompressionVariant::KrausCorrected: return "kraus-corrected";
  }
  return "unknown";
}

inline CompressionVariant parse_variant(std::string_view name) {
  if (name == "random-unitary") return CompressionVariant::RandomUnitary;
  if (name == "kraus-uncorrected") return CompressionVariant::KrausUncorrected;
  if (name == "kraus-corrected") return CompressionVariant::KrausCorrected;
  throw std::invalid_argument("unknown compression variant '" + std::string(name) + "'");
}

inline bool is_trace_preserving(CompressionVariant v) {
  return v != CompressionVariant::KrausUncorrected;
}

inline void require_polarization(double eps, const char* name) {
  if (!(eps >= -1.0 && eps <= 1.0))
    throw std::invalid_argument(std::string(name) + " = " + std::to_string(eps) +
                                " is outside [-1, 1]");
}

/// diag(1 - eps, 1 + eps) / 2
template <class Real = double>
BasicMatrix<Real> qubit_state(double eps) {
  require_polarization(eps, "polarization");
  const Real e(eps);
  const std::array<Real, 2> d{(Real(1) - e) / 2, (Real(1) + e) / 2};
  return BasicMatrix<Real>::diagonal(d);
}

/// Population imbalance p(1) - p(0) of a single-qubit matrix.
template <class Real>
Real polarization_of(const BasicMatrix<Real>& qubit) {
  if (qubit.rows() != 2 || qubit.cols() != 2)
    throw std::invalid_argument("polarization_of: expected a 2x2 matrix");
  return qubit(1, 1).real() - qubit(0, 0).real();
}

/// Marginal polarization of qubit 1, 2 or 3 of an 8x8 register state.
template <class Real>
Real marginal_polarization(const BasicMatrix<Real>& rho, int qubit) {
  const int keep[] = {qubit};
  return polarization_of(partial_trace(rho, keep));
}

template <class Real = double>
BasicMatrix<Real> product_state(double eps1, double eps2, double eps3) {
  return kron(kron(qubit_state<Real>(eps1), qubit_state<Real>(eps2)), qubit_state<Real>(eps3));
}

template <class Real>
BasicMatrix<Real> apply(const BasicKrausChannel<Real>& ch, const BasicMatrix<Real>& rho) {
  if (rho.rows() != ch.dim || rho.cols() != ch.dim)
    throw std::invalid_argument("apply: state dimension does not match channel '" + ch.label + "'");
  BasicMatrix<Real> out(ch.dim, ch.dim);
  for (const auto& e : ch.kraus_ops) out += e * rho * e.adjoint();
  return out;
}

/// ||sum E^dag E - I||_F
template <class Real>
double completeness_defect(const BasicKrausChannel<Real>& ch) {
  BasicMatrix<Real> sum(ch.dim, ch.dim);
  for (const auto& e : ch.kraus_ops) sum += e.adjoint() * e;
  return static_cast<double>(frobenius_distance(sum, BasicMatrix<Real>::identity(ch.dim)));
}

/// Amplitude damping of the target qubit towards |0>.
template <class Real = double>
BasicKrausChannel<Real> damping_channel(double gamma) {
  using std::sqrt;
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("damping_channel: gamma = " + std::to_string(gamma) +
                                " is outside [0, 1]");
  const Real g(gamma);
  BasicMatrix<Real> g1(2, 2), g2(2, 2);
  g1(0, 0) = Real(1);
  g1(1, 1) = sqrt(Real(1) - g);
  g2(0, 1) = sqrt(g);
  return BasicKrausChannel<Real>(2, {std::move(g1), std::move(g2)}, "damping");
}

/// exp(-i pi V / 2) with V = |100><011| + |011><100|; V restricted to the
/// pair is Pauli-x, so the exponential is -i V there and identity elsewhere.
template <class Real = double>
BasicMatrix<Real> ideal_swap_unitary() {
  auto u = BasicMatrix<Real>::identity(8);
  const std::complex<Real> minus_i{Real(0), Real(-1)};
  u(kState011, kState011) = Real(0);
  u(kState100, kState100) = Real(0);
  u(kState011, kState100) = minus_i;
  u(kState100, kState011) = minus_i;
  return u;
}

inline void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw std::invalid_argument("theta = " + std::to_string(theta) + " is outside [0, pi]");
}

template <class Real = double>
BasicKrausChannel<Real> compression_channel(double theta, CompressionVariant variant) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  using M = BasicMatrix<Real>;
  using C = std::complex<Real>;
  require_theta(theta);
  const Real s = sin(Real(theta)), c = cos(Real(theta));
  if (variant == CompressionVariant::RandomUnitary) {
    return BasicKrausChannel<Real>(8, {ideal_swap_unitary<Real>() * C{s}, M::identity(8) * C{c}},
                                   "compression/random-unitary");
  }

  const Real r = Real(1) / sqrt(Real(2));
  const M p011 = M::unit(8, kState011, kState011);
  const M p100 = M::unit(8, kState100, kState100);
  const M flip = M::unit(8, kState011, kState100) + M::unit(8, kState100, kState011);

  M k1 = M::identity(8) * C{r} - (p011 + p100) * C{r} - flip * C{Real(0), s};
  const Real sign100 = variant == CompressionVariant::KrausCorrected ? Real(1) : Real(-1);
  M k2 = M::identity(8) * C{r} + p011 * C{c - r} + p100 * C{sign100 * (c - r)};
  return BasicKrausChannel<Real>(8, {std::move(k1), std::move(k2)},
                                 std::string("compression/") + std::string(to_string(variant)));
}

/// Compression seen by the target qubit alone, with both resets in their
/// bath states. Operators are <i'j'|K_k|ij> sqrt(p2(i) p3(j)) taken as 2x2
/// blocks on the target; identically vanishing ones are dropped.
inline KrausChannel reduced_compression_channel(double theta, double eps2, double eps3,
                                                CompressionVariant variant) {
  require_polarization(eps2, "eps2");
  require_polarization(eps3, "eps3");
  const KrausChannel full = compression_channel(theta, variant);
  const std::array<double, 2> p2{(1.0 - eps2) / 2.0, (1.0 + eps2) / 2.0};
  const std::array<double, 2> p3{(1.0 - eps3) / 2.0, (1.0 + eps3) / 2.0};

  std::vector<ComplexMatrix> ops;
  for (const auto& k : full.kraus_ops)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        const double weight = std::sqrt(p2[i] * p3[j]);
        for (std::size_t ip = 0; ip < 2; ++ip)
          for (std::size_t jp = 0; jp < 2; ++jp) {
            ComplexMatrix c(2, 2);
            bool nonzero = false;
            for (std::size_t a = 0; a < 2; ++a)
              for (std::size_t b = 0; b < 2; ++b) {
                c(a, b) = k(4 * a + 2 * ip + jp, 4 * b + 2 * i + j) * weight;
                nonzero = nonzero || c(a, b) != complex{};
              }
            if (nonzero) ops.push_back(std::move(c));
          }
      }
  return KrausChannel(2, std::move(ops),
                      std::string("reduced-compression/") + std::string(to_string(variant)));
}

/// Replace both reset qubits by their bath states, keeping the target marginal.
template <class Real>
BasicMatrix<Real> refresh_matrix(const BasicMatrix<Real>& rho, double eps2, double eps3) {
  return kron(partial_trace(rho, {1}), kron(qubit_state<Real>(eps2), qubit_state<Real>(eps3)));
}

inline DensityMatrix refresh(const DensityMatrix& rho, double eps2, double eps3) {
  if (rho.dim() != 8) throw std::invalid_argument("refresh: expected a three-qubit state");
  return DensityMatrix(refresh_matrix(rho.matrix(), eps2, eps3));
}

}  // namespace hbac
