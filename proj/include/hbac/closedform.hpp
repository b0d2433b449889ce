// Closed-form cycle-n expressions for the three-qubit refrigerator.
//
// Notation: S = sin^2(theta), s = eps2(0) eps3(0),
//   F(theta)        = 3 + (1 + s) cos(2 theta) - s = 4 - 2 S (1 + s)
//   lambda          = (1 - gamma) F / 4 = exp(-G(theta, gamma))
// so every cycle-n quantity carries the factor lambda^n.
//
// The functions outside `printed` agree with direct channel propagation.
// The `printed` namespace evaluates the general reset-qubit, work and COP
// expressions in their originally stated form; they do not agree with
// propagation and exist so the audit can quantify the deviation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "hbac/channels.hpp"

namespace hbac {

struct ClosedFormParams {
  double gamma = 0.0;
  double theta = std::numbers::pi / 2;
  double eps1_0 = 0.0;
  double eps2_0 = 0.6;
  double eps3_0 = 0.6;

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::invalid_argument("gamma = " + std::to_string(gamma) + " is outside [0, 1]");
    require_theta(theta);
    require_polarization(eps1_0, "eps1");
    require_polarization(eps2_0, "eps2");
    require_polarization(eps3_0, "eps3");
  }
};

struct ShapeFunctions {
  double F = 0.0;
  double G = 0.0;  // +inf when (1 - gamma) F == 0
};

namespace detail {

inline double sin2(double theta) {
  const double s = std::sin(theta);
  return s * s;
}

inline double reset_product(const ClosedFormParams& p) { return p.eps2_0 * p.eps3_0; }

// 4 - 2 S (1 + s); equal to the cos(2 theta) form but exact at theta = 0.
inline double shape_F(const ClosedFormParams& p) {
  return 4.0 - 2.0 * sin2(p.theta) * (1.0 + reset_product(p));
}

inline double decay(const ClosedFormParams& p, int n) {
  if (n == 0) return 1.0;
  const double lambda = (1.0 - p.gamma) * shape_F(p) / 4.0;
  return std::pow(lambda, n);
}

// (gamma - 1) F + 4 written as 2 S (1 + s) + gamma F.
inline double stationary_denominator(const ClosedFormParams& p) {
  return 2.0 * sin2(p.theta) * (1.0 + reset_product(p)) + p.gamma * shape_F(p);
}

// Bracket multiplying lambda^n in the target polarization and the heat.
inline double transient_amplitude(const ClosedFormParams& p) {
  const double s = reset_product(p);
  return 2.0 * sin2(p.theta) * ((1.0 + s) * p.eps1_0 - p.eps2_0 - p.eps3_0) +
         p.gamma * (1.0 + p.eps1_0) * shape_F(p);
}

}  // namespace detail

inline ShapeFunctions F_and_G(const ClosedFormParams& p) {
  p.validate();
  const double F = detail::shape_F(p);
  const double lambda = (1.0 - p.gamma) * F / 4.0;
  return {F, lambda > 0.0 ? -std::log(lambda) : std::numeric_limits<double>::infinity()};
}

/// Target polarization after n cycles.
inline double epsilon1(const ClosedFormParams& p, int n) {
  p.validate();
  const double den = detail::stationary_denominator(p);
  if (den == 0.0) return p.eps1_0;  // gamma = 0 and theta in {0, pi}: nothing happens
  const double num = 2.0 * (p.eps2_0 + p.eps3_0) * detail::sin2(p.theta) -
                     p.gamma * detail::shape_F(p) + detail::transient_amplitude(p) * detail::decay(p, n);
  return num / den;
}

/// Stationary target polarization (n -> infinity).
inline double epsilon1_limit(const ClosedFormParams& p) {
  p.validate();
  const double den = detail::stationary_denominator(p);
  if (den == 0.0) return p.eps1_0;
  return (2.0 * (p.eps2_0 + p.eps3_0) * detail::sin2(p.theta) - p.gamma * detail::shape_F(p)) / den;
}

inline double heat(const ClosedFormParams& p, int n) {
  p.validate();
  return detail::transient_amplitude(p) * detail::decay(p, n) / 4.0;
}

/// J(n) = Q(n + 1) - Q(n) = [(1 - gamma) F / 4 - 1] Q(n).
inline double cooling_power(const ClosedFormParams& p, int n) {
  const double lambda = (1.0 - p.gamma) * detail::shape_F(p) / 4.0;
  return (lambda - 1.0) * heat(p, n);
}

/// Work of cycle n,
///   W(n) = [4 gamma S (1 + eps2)(1 + eps3) + R lambda^n (gamma - (1 - gamma) S (1 + s) / 2)] / D
/// with R the transient amplitude and D = (gamma - 1) F + 4. Written so that
/// the stationary part carries gamma explicitly and W stays accurate as it
/// decays to zero at gamma = 0.
inline double work_per_cycle(const ClosedFormParams& p, int n) {
  p.validate();
  const double S = detail::sin2(p.theta);
  const double s = detail::reset_product(p);
  const double g = p.gamma;
  const double den = detail::stationary_denominator(p);
  if (den == 0.0) return 0.0;
  const double stationary = 4.0 * g * S * (1.0 + p.eps2_0) * (1.0 + p.eps3_0);
  const double transient =
      detail::transient_amplitude(p) * detail::decay(p, n) * (g - (1.0 - g) * S * (1.0 + s) / 2.0);
  return (stationary + transient) / den;
}

/// -Q(n) / W(n); undefined when |W(n)| < 1e-14.
inline std::optional<double> cop(const ClosedFormParams& p, int n) {
  const double w = work_per_cycle(p, n);
  if (std::abs(w) < 1e-14) return std::nullopt;
  return -heat(p, n) / w;
}

// Specializations for an unpolarized target and equal resets eps2 = eps3 = eps.

inline double epsilon1_equal_resets(double gamma, double theta, double eps, int n) {
  const ClosedFormParams p{gamma, theta, 0.0, eps, eps};
  const double f = detail::shape_F(p);
  const double den = detail::stationary_denominator(p);
  if (den == 0.0) return 0.0;
  return (gamma * f + 2.0 * eps * (std::cos(2.0 * theta) - 1.0)) / den * (detail::decay(p, n) - 1.0);
}

inline std::optional<double> cop_equal_resets(double gamma, double theta, double eps, int n) {
  const ClosedFormParams p{gamma, theta, 0.0, eps, eps};
  p.validate();
  const double f = detail::shape_F(p);
  const double S = detail::sin2(theta);
  const double C = 1.0 - S;
  const double e = detail::decay(p, n);
  const double num =
      -(2.0 * gamma * (1.0 + C) - 2.0 * eps * (2.0 + gamma * eps) * S) * ((gamma - 1.0) * f + 4.0) * e;
  const double den = ((gamma - 1.0) * (f + 4.0 * (eps * eps + 1.0) * S) + 4.0) *
                         (gamma * f + 2.0 * eps * (std::cos(2.0 * theta) - 1.0)) * e +
                     16.0 * (1.0 + eps) * (1.0 + eps) * gamma * S;
  if (std::abs(den) < 1e-300) return std::nullopt;
  return num / den;
}

inline double cooling_power_equal_resets(double gamma, double theta, double eps, int n) {
  const ClosedFormParams p{gamma, theta, 0.0, eps, eps};
  p.validate();
  const double f = detail::shape_F(p);
  return ((gamma - 1.0) * f + 4.0) * (4.0 * eps * detail::sin2(theta) - gamma * f) *
         detail::decay(p, n) / 16.0;
}

/// Argument of the arccos in the optimal angle, before clamping.
inline double optimal_theta_argument(int n, double eps2, double eps3) {
  const double s = eps2 * eps3;
  return (2.0 * s + n * s + n - 6.0) / ((2.0 + n) * (1.0 + s));
}

inline double theta_opt(int n, double eps2, double eps3) {
  return 0.5 * std::acos(std::clamp(optimal_theta_argument(n, eps2, eps3), -1.0, 1.0));
}

/// Membership in the set of initial polarizations for which pi/2 stays
/// optimal at n = 1.
inline bool in_pi_half_region(double eps1, double eps2, double eps3) {
  const double third = 1.0 / 3.0;
  const bool c1 = eps1 >= 0.0 && eps1 < std::sqrt(third);
  const bool c2 = eps2 >= 0.0 && (eps1 == 0.0 || eps2 < third / eps1);
  const bool c3 = eps3 >= 0.0 && (eps2 == 0.0 || eps3 < third / eps2);
  return c1 && c2 && c3;
}

/// Compression angle maximizing the cooling power J(n) at gamma = 0.
/// Requires eps2, eps3 >= eps1 >= 0.
inline double optimal_theta(int n, double eps1, double eps2, double eps3) {
  if (n < 0) throw std::invalid_argument("optimal_theta: n must be non-negative");
  for (double e : {eps1, eps2, eps3}) require_polarization(e, "polarization");
  if (eps1 < 0.0 || eps2 < eps1 || eps3 < eps1)
    throw std::invalid_argument("optimal_theta: requires eps2, eps3 >= eps1 >= 0");
  if (n == 0) return std::numbers::pi / 2;
  if (n == 1 && in_pi_half_region(eps1, eps2, eps3)) return std::numbers::pi / 2;
  return theta_opt(n, eps2, eps3);
}

/// Short rule for eps1(0) = 0, eps2 = eps3 = eps: pi/2 for n < 2 and
/// eps < sqrt(1/3), otherwise theta_opt.
inline double optimal_theta_equal_resets(int n, double eps) {
  if (n < 2 && eps < std::sqrt(1.0 / 3.0)) return std::numbers::pi / 2;
  return theta_opt(n, eps, eps);
}

/// J(n) at theta_n for equal resets: (eps / 2)(1 + eps^2) sin^4(theta_n) exp(-n g(theta_n, 0)).
inline double cooling_power_max_equal_resets(double eps, int n) {
  const double theta_n = optimal_theta_equal_resets(n, eps);
  const ClosedFormParams p{0.0, theta_n, 0.0, eps, eps};
  const double S = detail::sin2(theta_n);
  return 0.5 * eps * (1.0 + eps * eps) * S * S * detail::decay(p, n);
}

namespace printed {

struct Values {
  std::optional<double> eps2_tilde;  // reset polarizations at the n-th compression
  std::optional<double> eps3_tilde;
  std::optional<double> W;
  std::optional<double> zeta;
};

inline std::optional<double> finite(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  return x;
}

/// Literal evaluation of the general reset-polarization, work and COP
/// expressions (with gamma (1 + eps1(0)) F as the intended grouping).
inline Values as_printed(const ClosedFormParams& p, int n) {
  p.validate();
  const double S = detail::sin2(p.theta);
  const double C = 1.0 - S;
  const double s = detail::reset_product(p);
  const double F = detail::shape_F(p);
  const double g = p.gamma;
  const double den = (g - 1.0) * F + 4.0;
  const double R = detail::transient_amplitude(p);
  const double e = detail::decay(p, n);

  auto reset = [&](double ei, double ej) {
    const double I = ((g - 1.0) * ei * ei + ei + g) * ej - ei + 1.0;
    return (2.0 * I * S + 4.0 * g * (1.0 - ei * C)) / (2.0 * den) + S * (1.0 + s) / F * R / den * e;
  };
  const double w = 4.0 * S * (1.0 + p.eps2_0) * (1.0 + p.eps3_0) / den +
                   (1.0 + 4.0 * g * S * (1.0 + s) * (g - 1.0) / den) * R * e / 4.0;
  const double z = -den * R * e /
                   ((den - 4.0 * (1.0 + s) * (1.0 - g) * S) * R * e +
                    16.0 * S * (1.0 + p.eps2_0) * (1.0 + p.eps3_0));
  return {finite(reset(p.eps2_0, p.eps3_0)), finite(reset(p.eps3_0, p.eps2_0)), finite(w), finite(z)};
}

/// (eps / 2)(1 + eps^2) exp(-n g(theta_n, 0)); lacks sin^4(theta_n), so exact
/// only where theta_n = pi/2.
inline double cooling_power_max_equal_resets(double eps, int n) {
  const ClosedFormParams p{0.0, optimal_theta_equal_resets(n, eps), 0.0, eps, eps};
  return 0.5 * eps * (1.0 + eps * eps) * detail::decay(p, n);
}

/// Small-gamma form of the maximal cooling power for general polarizations,
/// evaluated at theta_n including its first-order gamma term.
inline double cooling_power_max_small_gamma(double gamma, double eps1, double eps2, double eps3, int n) {
  const double s = eps2 * eps3;
  const ClosedFormParams p{0.0, optimal_theta(n, eps1, eps2, eps3), eps1, eps2, eps3};
  const double e = detail::decay(p, n) / (2.0 - 2.0 * s);
  const double lead = (1.0 + s) * (eps2 + eps3 - eps1 * (1.0 + s)) * e;
  const double first = gamma *
                       (2.0 * eps2 + 2.0 * eps3 + s * s - 1.0 -
                        (1.0 + s) * (eps1 * (n - 3.0 + (1.0 + n) * s) - n * (eps2 + eps3))) *
                       e;
  return lead + first;
}

/// Small-gamma form of the COP at theta = pi/2 including its first-order term.
inline double cop_max_small_gamma(double gamma, double eps1, double eps2, double eps3, int n) {
  const double s = eps2 * eps3;
  const ClosedFormParams p{0.0, std::numbers::pi / 2, eps1, eps2, eps3};
  const double growth = 1.0 / detail::decay(p, n);
  return 1.0 + 4.0 * gamma / (1.0 + s) *
                   (1.0 + (1.0 + eps2) * (1.0 + eps3) / (eps1 - eps2 - eps3 + eps1 * s) * growth);
}

}  // namespace printed

}  // namespace hbac
