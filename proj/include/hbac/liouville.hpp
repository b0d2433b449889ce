// Liouville-space representation of channels.
//
// Vectorization stacks rows: vec(rho)[r * D + s] = rho(r, s). With this
// ordering vec(A rho B) = (A kron B^T) vec(rho), so a Kraus list maps to
// sum_mu E_mu kron conj(E_mu) = sum_mu E_mu kron (E_mu^dag)^T.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbac/channels.hpp"
#include "hbac/qmat.hpp"

namespace hbac {

template <class Real>
struct BasicSuperVector {
  std::size_t hilbert_dim = 0;  // D; entries has D * D elements
  std::vector<std::complex<Real>> entries;
};

template <class Real>
struct BasicSuperoperator {
  std::size_t hilbert_dim = 0;  // D; matrix is D^2 x D^2
  BasicMatrix<Real> matrix;
  std::string label;
};

using SuperVector = BasicSuperVector<double>;
using Superoperator = BasicSuperoperator<double>;

template <class Real>
BasicSuperVector<Real> vectorize(const BasicMatrix<Real>& rho) {
  if (!rho.is_square()) throw std::invalid_argument("vectorize: matrix is not square");
  return {rho.rows(), std::vector<std::complex<Real>>(rho.entries().begin(), rho.entries().end())};
}

inline SuperVector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

template <class Real>
BasicMatrix<Real> unvectorize_matrix(const BasicSuperVector<Real>& v) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v.entries.size()))));
  if (d * d != v.entries.size() || d != v.hilbert_dim)
    throw std::invalid_argument("unvectorize: length " + std::to_string(v.entries.size()) +
                                " is not the square of the Hilbert dimension");
  return BasicMatrix<Real>(d, d, v.entries);
}

inline DensityMatrix unvectorize(const SuperVector& v) {
  return DensityMatrix(unvectorize_matrix(v));
}

template <class Real>
BasicSuperoperator<Real> superoperator_of(const BasicKrausChannel<Real>& ch) {
  const std::size_t d2 = ch.dim * ch.dim;
  BasicMatrix<Real> phi(d2, d2);
  for (const auto& e : ch.kraus_ops) phi += kron(e, e.conjugate());
  return {ch.dim, std::move(phi), ch.label};
}

/// Superoperator of an arbitrary linear map, built column by column from
/// the images of the matrix units |r><s|.
template <class Real = double>
BasicSuperoperator<Real> superoperator_of_map(
    std::size_t dim, const std::function<BasicMatrix<Real>(const BasicMatrix<Real>&)>& map,
    std::string label) {
  const std::size_t d2 = dim * dim;
  BasicMatrix<Real> phi(d2, d2);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t s = 0; s < dim; ++s) {
      const BasicMatrix<Real> image = map(BasicMatrix<Real>::unit(dim, r, s));
      const auto col = vectorize(image);
      for (std::size_t k = 0; k < d2; ++k) phi(k, r * dim + s) = col.entries[k];
    }
  return {dim, std::move(phi), std::move(label)};
}

template <class Real = double>
BasicSuperoperator<Real> identity_superoperator(std::size_t dim) {
  return {dim, BasicMatrix<Real>::identity(dim * dim), "identity"};
}

/// after . before (before acts first).
template <class Real>
BasicSuperoperator<Real> compose(const BasicSuperoperator<Real>& after, const BasicSuperoperator<Real>& before) {
  if (after.hilbert_dim != before.hilbert_dim)
    throw std::invalid_argument("compose: dimension mismatch");
  return {after.hilbert_dim, after.matrix * before.matrix, after.label + " . " + before.label};
}

template <class Real>
BasicSuperVector<Real> apply(const BasicSuperoperator<Real>& phi, const BasicSuperVector<Real>& v) {
  if (phi.hilbert_dim != v.hilbert_dim)
    throw std::invalid_argument("apply: superoperator acts on dimension " +
                                std::to_string(phi.hilbert_dim) + ", state has " +
                                std::to_string(v.hilbert_dim));
  return {v.hilbert_dim, phi.matrix.apply(v.entries)};
}

/// Row-compressed copy of a superoperator for repeated application; the
/// cycle superoperators have a few hundred non-zeros out of 4096.
template <class Real>
class SparseSuperoperator {
 public:
  explicit SparseSuperoperator(const BasicSuperoperator<Real>& phi) : hilbert_dim_(phi.hilbert_dim) {
    const auto& m = phi.matrix;
    row_start_.push_back(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(r, c) != std::complex<Real>{}) {
          cols_.push_back(c);
          values_.push_back(m(r, c));
        }
      row_start_.push_back(cols_.size());
    }
  }

  std::size_t non_zeros() const { return values_.size(); }

  BasicSuperVector<Real> apply(const BasicSuperVector<Real>& v) const {
    if (v.hilbert_dim != hilbert_dim_) throw std::invalid_argument("apply: dimension mismatch");
    BasicSuperVector<Real> out{hilbert_dim_, std::vector<std::complex<Real>>(row_start_.size() - 1)};
    for (std::size_t r = 0; r + 1 < row_start_.size(); ++r) {
      std::complex<Real> acc{};
      for (std::size_t k = row_start_[r]; k < row_start_[r + 1]; ++k) acc += values_[k] * v.entries[cols_[k]];
      out.entries[r] = acc;
    }
    return out;
  }

 private:
  std::size_t hilbert_dim_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> cols_;
  std::vector<std::complex<Real>> values_;
};

/// phi^n by repeated squaring.
template <class Real>
BasicSuperoperator<Real> power(const BasicSuperoperator<Real>& phi, std::size_t n) {
  auto result = identity_superoperator<Real>(phi.hilbert_dim);
  auto base = phi;
  while (n > 0) {
    if (n & 1u) result.matrix = result.matrix * base.matrix;
    n >>= 1u;
    if (n > 0) base.matrix = base.matrix * base.matrix;
  }
  result.label = phi.label + "^n";
  return result;
}

inline DensityMatrix propagate(const Superoperator& phi, const DensityMatrix& rho0, std::size_t n) {
  if (phi.hilbert_dim != rho0.dim()) throw std::invalid_argument("propagate: dimension mismatch");
  return unvectorize(apply(power(phi, n), vectorize(rho0)));
}

/// Parameters of one damping / compression / refresh round.
struct CycleParameters {
  double gamma = 0.0;
  double theta = std::numbers::pi / 2;
  double eps2 = 0.6;
  double eps3 = 0.6;
  CompressionVariant variant = CompressionVariant::RandomUnitary;
};

enum class CycleScope { TargetOnly, Full };

/// The three strokes of a full-register cycle as separate superoperators.
template <class Real>
struct BasicCycleStages {
  BasicSuperoperator<Real> damping;  // target damping, identity on the resets
  BasicSuperoperator<Real> compression;
  BasicSuperoperator<Real> refresh;
};

using CycleStages = BasicCycleStages<double>;

template <class Real = double>
BasicKrausChannel<Real> extended_damping_channel(double gamma) {
  const auto d = damping_channel<Real>(gamma);
  std::vector<BasicMatrix<Real>> ops;
  for (const auto& g : d.kraus_ops) ops.push_back(kron(g, BasicMatrix<Real>::identity(4)));
  return BasicKrausChannel<Real>(8, std::move(ops), "damping (x) I4");
}

template <class Real = double>
BasicSuperoperator<Real> refresh_superoperator(double eps2, double eps3) {
  require_polarization(eps2, "eps2");
  require_polarization(eps3, "eps3");
  return superoperator_of_map<Real>(
      8, [&](const BasicMatrix<Real>& m) { return refresh_matrix(m, eps2, eps3); }, "refresh");
}

template <class Real = double>
BasicCycleStages<Real> cycle_stages(const CycleParameters& p) {
  return {superoperator_of(extended_damping_channel<Real>(p.gamma)),
          superoperator_of(compression_channel<Real>(p.theta, p.variant)),
          refresh_superoperator<Real>(p.eps2, p.eps3)};
}

inline Superoperator cycle_superoperator(const CycleParameters& p, CycleScope scope) {
  if (scope == CycleScope::TargetOnly) {
    return compose(superoperator_of(reduced_compression_channel(p.theta, p.eps2, p.eps3, p.variant)),
                   superoperator_of(damping_channel(p.gamma)));
  }
  const CycleStages s = cycle_stages(p);
  return compose(s.refresh, compose(s.compression, s.damping));
}

}  // namespace hbac
