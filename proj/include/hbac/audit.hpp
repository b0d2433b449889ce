// Closed-form versus channel-propagation comparison table.
//
// Row classes:
//   trusted     closed forms expected to match propagation (|diff| <= 1e-9)
//   as-printed  expressions kept in their original form; deviations are findings
//   probe       small-gamma expansions, expected to agree only to O(gamma^2)
//   convention  bookkeeping checks of the vectorization ordering
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hbac/closedform.hpp"
#include "hbac/engine.hpp"
#include "hbac/liouville.hpp"

namespace hbac {

struct AuditRow {
  std::string formula;
  std::string row_class;
  double gamma = 0.0;
  double theta = 0.0;
  double eps1_0 = 0.0;
  double eps2_0 = 0.0;
  double eps3_0 = 0.0;
  int n = 0;
  std::optional<double> closed_form;
  std::optional<double> numeric;

  std::optional<double> abs_diff() const {
    if (!closed_form || !numeric) return std::nullopt;
    return std::abs(*closed_form - *numeric);
  }
};

struct AuditSpec {
  std::vector<double> gammas{0.0, 0.1};
  std::vector<double> thetas{std::numbers::pi / 3, std::numbers::pi / 2};
  double eps1_0 = 0.0;
  double eps2_0 = 0.6;
  double eps3_0 = 0.6;
  int cycles = 20;
};

inline constexpr double kTrustedTolerance = 1e-9;

namespace detail {

/// ||unvec(Phi vec(rho)) - K[rho]|| for the corrected Kraus compression
/// (complex operators) on a state with coherences, when vec stacks columns
/// (column_major) or rows, with Phi = sum E kron conj(E).
inline double stacking_mismatch(double theta, bool column_major) {
  const KrausChannel ch = compression_channel(theta, CompressionVariant::KrausCorrected);
  const Superoperator phi = superoperator_of(ch);
  ComplexMatrix psi(8, 1);
  for (std::size_t k = 0; k < 8; ++k) psi(k, 0) = complex(1.0 + k, static_cast<double>(k % 3));
  const ComplexMatrix pure = psi * psi.adjoint();
  const ComplexMatrix rho = pure * complex(0.5 / pure.trace().real()) +
                            ComplexMatrix::identity(8) * complex(0.5 / 8.0);
  const ComplexMatrix in = column_major ? rho.transpose() : rho;
  ComplexMatrix out = unvectorize_matrix(apply(phi, vectorize(in)));
  if (column_major) out = out.transpose();
  return frobenius_distance(out, apply(ch, rho));
}

inline bool sorted_resets_ok(const AuditSpec& s) {
  return s.eps1_0 >= 0.0 && s.eps2_0 >= s.eps1_0 && s.eps3_0 >= s.eps1_0;
}

}  // namespace detail

inline std::vector<AuditRow> run_audit(const AuditSpec& spec) {
  std::vector<double> gammas = spec.gammas, thetas = spec.thetas;
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

  std::vector<AuditRow> rows;
  auto add = [&](std::string formula, std::string cls, double g, double th, int n,
                 std::optional<double> closed, std::optional<double> numeric) {
    rows.push_back({std::move(formula), std::move(cls), g, th, spec.eps1_0, spec.eps2_0, spec.eps3_0, n,
                    closed, numeric});
  };
  const bool equal_resets = spec.eps1_0 == 0.0 && spec.eps2_0 == spec.eps3_0;

  for (double g : gammas) {
    for (double th : thetas) {
      const RefrigeratorConfig cfg(g, th, spec.eps1_0, spec.eps2_0, spec.eps3_0, spec.cycles);
      const auto rec = run_cycles(cfg, {.cross_check_target_only = true});
      const ClosedFormParams p{g, th, spec.eps1_0, spec.eps2_0, spec.eps3_0};

      for (int n = 0; n < spec.cycles; ++n) {
        const auto& r = rec[static_cast<std::size_t>(n)];
        add("target_polarization", "trusted", g, th, n, epsilon1(p, n), r.eps1);
        add("heat", "trusted", g, th, n, heat(p, n), r.Q);
        add("cooling_power", "trusted", g, th, n, cooling_power(p, n), r.J);
        add("work_per_cycle", "trusted", g, th, n, work_per_cycle(p, n), r.W);
        add("cop", "trusted", g, th, n, cop(p, n), r.zeta);
        if (equal_resets) {
          add("target_polarization_equal_resets", "trusted", g, th, n,
              epsilon1_equal_resets(g, th, spec.eps2_0, n), r.eps1);
          add("cooling_power_equal_resets", "trusted", g, th, n,
              cooling_power_equal_resets(g, th, spec.eps2_0, n), r.J);
          if (r.zeta)
            add("cop_equal_resets", "trusted", g, th, n, cop_equal_resets(g, th, spec.eps2_0, n), r.zeta);
        }
      }

      for (int n = 0; n < spec.cycles; ++n) {
        const auto& r = rec[static_cast<std::size_t>(n)];
        const auto pv = printed::as_printed(p, n + 1);
        add("reset2_polarization_general", "as-printed", g, th, n + 1, pv.eps2_tilde, r.eps2_tilde);
        add("reset3_polarization_general", "as-printed", g, th, n + 1, pv.eps3_tilde, r.eps3_tilde);
        const auto pw = printed::as_printed(p, n);
        add("work_general", "as-printed", g, th, n, pw.W, r.W);
        add("cop_general", "as-printed", g, th, n, pw.zeta, r.zeta);
      }

      add("completeness_kraus_uncorrected", "as-printed", g, th, 0, 0.0,
          completeness_defect(compression_channel(th, CompressionVariant::KrausUncorrected)));
      add("completeness_kraus_corrected", "trusted", g, th, 0, 0.0,
          completeness_defect(compression_channel(th, CompressionVariant::KrausCorrected)));
      add("completeness_random_unitary", "trusted", g, th, 0, 0.0,
          completeness_defect(compression_channel(th, CompressionVariant::RandomUnitary)));
      add("superoperator_row_stacking", "convention", g, th, 0, 0.0, detail::stacking_mismatch(th, false));
      add("superoperator_column_stacking", "convention", g, th, 0, 0.0, detail::stacking_mismatch(th, true));
    }

    // Small-gamma expansions, each at its own angle.
    const double half_pi = std::numbers::pi / 2;
    const RefrigeratorConfig ideal(g, half_pi, spec.eps1_0, spec.eps2_0, spec.eps3_0, spec.cycles);
    const auto rec = run_cycles(ideal);
    for (int n = 0; n < spec.cycles; ++n) {
      add("cop_max_small_gamma", "probe", g, half_pi, n,
          printed::cop_max_small_gamma(g, spec.eps1_0, spec.eps2_0, spec.eps3_0, n),
          rec[static_cast<std::size_t>(n)].zeta);
      if (detail::sorted_resets_ok(spec)) {
        const double th_n = optimal_theta(n, spec.eps1_0, spec.eps2_0, spec.eps3_0);
        const double j = cooling_power_series({g, th_n, spec.eps2_0, spec.eps3_0}, spec.eps1_0, n).back();
        add("cooling_power_max_small_gamma", "probe", g, th_n, n,
            printed::cooling_power_max_small_gamma(g, spec.eps1_0, spec.eps2_0, spec.eps3_0, n), j);
        if (g == 0.0 && spec.eps1_0 == 0.0 && spec.eps2_0 == spec.eps3_0) {
          add("cooling_power_max_equal_resets", "trusted", g, th_n, n,
              cooling_power_max_equal_resets(spec.eps2_0, n), j);
          add("cooling_power_max_equal_resets_general", "as-printed", g, th_n, n,
              printed::cooling_power_max_equal_resets(spec.eps2_0, n), j);
        }
      }
    }
  }
  return rows;
}

}  // namespace hbac
