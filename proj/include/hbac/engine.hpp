// Cycle-by-cycle simulation of the refrigerator and its thermodynamic record.
//
// Energies use H_i = -sigma^z_i in dimensionless units, so a qubit of
// polarization eps carries mean energy -eps and heat / work are (minus)
// polarization changes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbac/channels.hpp"
#include "hbac/liouville.hpp"
#include "hbac/precision.hpp"

namespace hbac {

/// Below this |W| the coefficient of performance is reported as undefined.
inline constexpr double kWorkFloor = 1e-14;

class RefrigeratorConfig {
 public:
  RefrigeratorConfig() : RefrigeratorConfig(0.0, std::numbers::pi / 2, 0.0, 0.6, 0.6, 20) {}

  RefrigeratorConfig(double gamma, double theta, double eps1_0, double eps2_0, double eps3_0,
                     int cycles, CompressionVariant variant = CompressionVariant::RandomUnitary)
      : gamma_(gamma), theta_(theta), eps1_0_(eps1_0), eps2_0_(eps2_0), eps3_0_(eps3_0),
        cycles_(cycles), variant_(variant) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("gamma = " + std::to_string(gamma) + " is outside [0, 1]");
    require_theta(theta);
    require_polarization(eps1_0, "eps1");
    require_polarization(eps2_0, "eps2");
    require_polarization(eps3_0, "eps3");
    if (cycles < 0) throw std::invalid_argument("cycles must be non-negative");
  }

  double gamma() const { return gamma_; }
  double theta() const { return theta_; }
  double eps1_0() const { return eps1_0_; }
  double eps2_0() const { return eps2_0_; }
  double eps3_0() const { return eps3_0_; }
  int cycles() const { return cycles_; }
  CompressionVariant variant() const { return variant_; }

  CycleParameters cycle_parameters() const {
    return {gamma_, theta_, eps2_0_, eps3_0_, variant_};
  }

 private:
  double gamma_, theta_, eps1_0_, eps2_0_, eps3_0_;
  int cycles_;
  CompressionVariant variant_;
};

struct CycleRecord {
  int n = 0;
  double eps1 = 0.0;        // target polarization after n cycles
  double eps2_tilde = 0.0;  // reset marginals after the compression of cycle n, before refresh
  double eps3_tilde = 0.0;
  double Q = 0.0;
  double W = 0.0;
  double J = 0.0;
  std::optional<double> zeta;
  double T_c = 0.0;  // +inf for eps1 == 0
  std::optional<double> zeta_carnot;
};

/// 1 / ln[(1 + eps) / (1 - eps)]; negative for population inversion.
inline double temperature_of(double eps) {
  require_polarization(eps, "polarization");
  if (eps == 0.0) return std::numeric_limits<double>::infinity();
  if (eps == 1.0) return 0.0;
  if (eps == -1.0) return -0.0;
  return 1.0 / std::log((1.0 + eps) / (1.0 - eps));
}

/// T_c / (T_h - T_c); undefined unless T_c < T_h by more than rounding.
inline std::optional<double> carnot_cop(double eps_cold, double eps_hot) {
  const double tc = temperature_of(eps_cold);
  const double th = temperature_of(eps_hot);
  if (!(tc < th) || th - tc <= 1e-12 * std::abs(th)) return std::nullopt;
  if (std::isinf(th)) return 0.0;
  return tc / (th - tc);
}

struct RunOptions {
  /// Re-derive the target marginal through the 4x4 target-only superoperator
  /// and fail if the two paths disagree by more than 1e-10.
  bool cross_check_target_only = false;
};

namespace detail {

/// Polarizations along a run, kept in extended precision until Q, W and J
/// have been formed.
struct Trace {
  std::vector<Quad> eps1;  // eps1[k], k = 0..rounds
  std::vector<Quad> eps1_tilde, eps2_tilde, eps3_tilde;  // during cycle k
};

struct QuadStages {
  SparseSuperoperator<Quad> damping, compression, refresh;

  explicit QuadStages(const BasicCycleStages<Quad>& s)
      : damping(s.damping), compression(s.compression), refresh(s.refresh) {}
};

/// Throws std::domain_error unless the state is a valid density matrix.
inline void require_state(const BasicMatrix<Quad>& rho) {
  (void)DensityMatrix(convert<double>(rho));
}

/// Runs `rounds` cycles; compression_for(k) selects the compression of cycle k.
template <class CompressionFor>
Trace run_trace(const RefrigeratorConfig& cfg, const QuadStages& stages, int rounds,
                CompressionFor&& compression_for) {
  Trace t;
  const auto rho0 = product_state<Quad>(cfg.eps1_0(), cfg.eps2_0(), cfg.eps3_0());
  require_state(rho0);
  auto v = vectorize(rho0);
  t.eps1.push_back(Quad(cfg.eps1_0()));
  for (int k = 0; k < rounds; ++k) {
    const auto compressed = compression_for(k).apply(stages.damping.apply(v));
    const auto rho_tilde = unvectorize_matrix(compressed);
    require_state(rho_tilde);
    t.eps1_tilde.push_back(marginal_polarization(rho_tilde, 1));
    t.eps2_tilde.push_back(marginal_polarization(rho_tilde, 2));
    t.eps3_tilde.push_back(marginal_polarization(rho_tilde, 3));
    v = stages.refresh.apply(compressed);
    const auto rho = unvectorize_matrix(v);
    require_state(rho);
    t.eps1.push_back(marginal_polarization(rho, 1));
  }
  return t;
}

inline std::vector<CycleRecord> records_from(const RefrigeratorConfig& cfg, const Trace& t) {
  std::vector<CycleRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.cycles()));
  const Quad e2(cfg.eps2_0()), e3(cfg.eps3_0());
  auto heat = [&](int n) { return t.eps1[n] - t.eps1[n + 1]; };
  for (int n = 0; n < cfg.cycles(); ++n) {
    const Quad q = heat(n);
    const Quad w = -((t.eps1_tilde[n] - t.eps1[n]) + (t.eps2_tilde[n] - e2) + (t.eps3_tilde[n] - e3));
    CycleRecord r;
    r.n = n;
    r.eps1 = static_cast<double>(t.eps1[n]);
    r.eps2_tilde = static_cast<double>(t.eps2_tilde[n]);
    r.eps3_tilde = static_cast<double>(t.eps3_tilde[n]);
    r.Q = static_cast<double>(q);
    r.W = static_cast<double>(w);
    r.J = static_cast<double>(heat(n + 1) - q);
    if (std::abs(r.W) >= kWorkFloor) r.zeta = static_cast<double>(-q / w);
    r.T_c = temperature_of(std::clamp(r.eps1, -1.0, 1.0));
    r.zeta_carnot = carnot_cop(std::clamp(r.eps1, -1.0, 1.0), cfg.eps2_0());
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

/// Target polarizations eps1(0..count) from the 4x4 target-only cycle.
inline std::vector<double> target_polarization_series(const CycleParameters& p, double eps1_0,
                                                      int count) {
  const Superoperator phi = cycle_superoperator(p, CycleScope::TargetOnly);
  SuperVector v = vectorize(qubit_state(eps1_0));
  std::vector<double> eps{eps1_0};
  for (int k = 0; k < count; ++k) {
    v = apply(phi, v);
    eps.push_back(polarization_of(unvectorize_matrix(v)));
  }
  return eps;
}

/// Numeric J(0..n_max) from the target-only cycle, J(n) = Q(n + 1) - Q(n).
inline std::vector<double> cooling_power_series(const CycleParameters& p, double eps1_0, int n_max) {
  const auto eps = target_polarization_series(p, eps1_0, n_max + 2);
  std::vector<double> j;
  for (int n = 0; n <= n_max; ++n) j.push_back((eps[n + 1] - eps[n + 2]) - (eps[n] - eps[n + 1]));
  return j;
}

/// Simulates cycles + 1 rounds through the full 64x64 Liouville path (the
/// extra round supplies Q(n + 1) for the last cooling power).
inline std::vector<CycleRecord> run_cycles(const RefrigeratorConfig& cfg, RunOptions options = {}) {
  if (!is_trace_preserving(cfg.variant()))
    throw std::domain_error("run_cycles: compression variant '" +
                            std::string(to_string(cfg.variant())) + "' is not trace preserving");
  const detail::QuadStages stages(cycle_stages<Quad>(cfg.cycle_parameters()));
  const int rounds = cfg.cycles() + 1;
  const detail::Trace t = detail::run_trace(
      cfg, stages, rounds, [&](int) -> const SparseSuperoperator<Quad>& { return stages.compression; });

  if (options.cross_check_target_only) {
    const auto reduced = target_polarization_series(cfg.cycle_parameters(), cfg.eps1_0(), rounds);
    for (std::size_t k = 0; k < reduced.size(); ++k)
      if (std::abs(reduced[k] - static_cast<double>(t.eps1[k])) > 1e-10)
        throw std::runtime_error("run_cycles: target-only and full paths disagree at n = " +
                                 std::to_string(k));
  }
  return detail::records_from(cfg, t);
}

/// One stochastic realization of the random-unitary compression: each cycle
/// applies the ideal swap with probability sin^2(theta), else nothing.
inline std::vector<CycleRecord> sample_trajectory(const RefrigeratorConfig& cfg, std::uint64_t seed) {
  if (cfg.variant() != CompressionVariant::RandomUnitary)
    throw std::invalid_argument("sample_trajectory: requires the random-unitary compression");
  const detail::QuadStages stages(cycle_stages<Quad>(cfg.cycle_parameters()));
  const SparseSuperoperator<Quad> swap(
      superoperator_of(BasicKrausChannel<Quad>(8, {ideal_swap_unitary<Quad>()}, "swap")));
  const SparseSuperoperator<Quad> idle(identity_superoperator<Quad>(8));
  const double sin_theta = std::sin(cfg.theta());
  const double p_swap = sin_theta * sin_theta;

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const detail::Trace t = detail::run_trace(cfg, stages, cfg.cycles() + 1,
                                            [&](int) -> const SparseSuperoperator<Quad>& {
                                              return uniform() < p_swap ? swap : idle;
                                            });
  return detail::records_from(cfg, t);
}

}  // namespace hbac
