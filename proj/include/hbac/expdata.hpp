// Measured target-polarization series -> heat, work, cooling power and COP
// with first-order (uncorrelated) error propagation.
//
// Input format (UTF-8, comma separated):
//   # comment lines anywhere
//   gamma=1e-4            preamble, key=value, before the header
//   theta=0.924
//   eps2_0=0.58
//   eps3_0=0.41
//   sigma_eps2_0=0.03     optional, default 0
//   sigma_eps3_0=0.01     optional, default 0
//   n,eps1,sigma_eps1
//   0,0.0,0.03
//   ...
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hbac/channels.hpp"

namespace hbac {

struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

struct MeasurementSeries {
  int first_cycle = 0;
  std::vector<Measured> eps1;  // eps1[k] belongs to cycle first_cycle + k
  Measured eps2_0;
  Measured eps3_0;
  double gamma = 0.0;
  double theta = 0.0;

  void validate() const {
    if (eps1.size() < 2) throw std::invalid_argument("series needs at least 2 cycles");
    auto check = [](const Measured& m, const std::string& what) {
      if (!(m.value >= -1.0 && m.value <= 1.0))
        throw std::invalid_argument(what + " = " + std::to_string(m.value) + " is outside [-1, 1]");
      if (!std::isfinite(m.sigma) || m.sigma < 0.0)
        throw std::invalid_argument("sigma of " + what + " must be finite and >= 0");
    };
    for (std::size_t k = 0; k < eps1.size(); ++k)
      check(eps1[k], "eps1 at n = " + std::to_string(first_cycle + static_cast<int>(k)));
    check(eps2_0, "eps2_0");
    check(eps3_0, "eps3_0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma is outside [0, 1]");
    require_theta(theta);
  }
};

struct ExperimentalRecord {
  int n = 0;
  Measured Q;
  Measured W;
  std::optional<Measured> J;     // needs eps1(n + 2)
  std::optional<Measured> zeta;  // undefined when |W| < sigma_W
  bool zeta_flagged = false;     // zeta outside [0, 1.5]
};

class SeriesParseError : public std::runtime_error {
 public:
  SeriesParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, int line, const std::string& what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw SeriesParseError(line, "malformed " + what + " '" + std::string(text) + "'");
  return v;
}

inline int parse_int(std::string_view text, int line) {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw SeriesParseError(line, "malformed cycle index '" + std::string(text) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline MeasurementSeries parse_series(std::istream& in) {
  std::map<std::string, double> sidecar;
  std::vector<std::pair<int, Measured>> rows;
  bool header_seen = false;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = detail::trim(line.substr(3));
    if (line.empty() || line.front() == '#') continue;

    if (!header_seen) {
      if (const auto eq = line.find('='); eq != std::string_view::npos) {
        const std::string key(detail::trim(line.substr(0, eq)));
        if (sidecar.contains(key)) throw SeriesParseError(line_no, "duplicate key '" + key + "'");
        sidecar[key] = detail::parse_double(line.substr(eq + 1), line_no, key);
        continue;
      }
      const auto cols = detail::split(line, ',');
      if (cols.size() != 3 || cols[0] != "n" || cols[1] != "eps1" || cols[2] != "sigma_eps1")
        throw SeriesParseError(line_no, "expected header 'n,eps1,sigma_eps1'");
      header_seen = true;
      continue;
    }

    const auto cols = detail::split(line, ',');
    if (cols.size() != 3)
      throw SeriesParseError(line_no, "expected 3 fields, got " + std::to_string(cols.size()));
    const int n = detail::parse_int(cols[0], line_no);
    const Measured m{detail::parse_double(cols[1], line_no, "eps1"),
                     detail::parse_double(cols[2], line_no, "sigma_eps1")};
    if (!(m.value >= -1.0 && m.value <= 1.0))
      throw SeriesParseError(line_no, "eps1 = " + std::string(cols[1]) + " is outside [-1, 1]");
    if (m.sigma < 0.0) throw SeriesParseError(line_no, "sigma_eps1 must be >= 0");
    rows.emplace_back(n, m);
  }
  if (!header_seen) throw SeriesParseError(line_no, "missing header 'n,eps1,sigma_eps1'");

  for (const char* key : {"gamma", "theta", "eps2_0", "eps3_0"})
    if (!sidecar.contains(key))
      throw std::invalid_argument(std::string("missing preamble key '") + key + "'");
  for (const auto& [key, value] : sidecar) {
    static const char* known[] = {"gamma", "theta", "eps2_0", "eps3_0", "sigma_eps2_0", "sigma_eps3_0"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw std::invalid_argument("unknown preamble key '" + key + "'");
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  MeasurementSeries s;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0 && rows[k].first == rows[k - 1].first)
      throw std::invalid_argument("duplicate cycle n = " + std::to_string(rows[k].first));
    if (k > 0 && rows[k].first != rows[k - 1].first + 1)
      throw std::invalid_argument("missing cycle n = " + std::to_string(rows[k - 1].first + 1));
    s.eps1.push_back(rows[k].second);
  }
  s.first_cycle = rows.empty() ? 0 : rows.front().first;
  s.gamma = sidecar["gamma"];
  s.theta = sidecar["theta"];
  s.eps2_0 = {sidecar["eps2_0"], sidecar.contains("sigma_eps2_0") ? sidecar["sigma_eps2_0"] : 0.0};
  s.eps3_0 = {sidecar["eps3_0"], sidecar.contains("sigma_eps3_0") ? sidecar["sigma_eps3_0"] : 0.0};
  s.validate();
  return s;
}

inline MeasurementSeries parse_series(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_series(in);
}

/// Q, W, J and COP for every cycle n with eps1(n + 1) available.
inline std::vector<ExperimentalRecord> analyze(const MeasurementSeries& series) {
  series.validate();
  const double S = std::pow(std::sin(series.theta), 2);
  const double g = series.gamma;
  const double e2 = series.eps2_0.value, e3 = series.eps3_0.value;
  const double s2 = series.eps2_0.sigma, s3 = series.eps3_0.sigma;
  const double prod = e2 * e3;
  const auto& eps = series.eps1;

  std::vector<ExperimentalRecord> out;
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    const double a = eps[k].value, b = eps[k + 1].value;
    const double sa = eps[k].sigma, sb = eps[k + 1].sigma;

    ExperimentalRecord r;
    r.n = series.first_cycle + static_cast<int>(k);

    const double q = a - b;
    r.Q = {q, std::hypot(sa, sb)};

    const double w = S * (g * (prod + 1.0) + (g - 1.0) * (prod + 1.0) * a + e2 + e3) + a - b;
    // dW/d(input), inputs: a = eps1(n), b = eps1(n+1), eps2_0, eps3_0
    const double dw_da = S * (g - 1.0) * (prod + 1.0) + 1.0;
    const double dw_db = -1.0;
    const double dw_d2 = S * (g * e3 + (g - 1.0) * e3 * a + 1.0);
    const double dw_d3 = S * (g * e2 + (g - 1.0) * e2 * a + 1.0);
    const double sigma_w = std::sqrt(std::pow(dw_da * sa, 2) + std::pow(dw_db * sb, 2) +
                                     std::pow(dw_d2 * s2, 2) + std::pow(dw_d3 * s3, 2));
    r.W = {w, sigma_w};

    if (k + 2 < eps.size()) {
      const double c = eps[k + 2].value, sc = eps[k + 2].sigma;
      // J = Q(n+1) - Q(n) = -a + 2b - c
      r.J = Measured{(b - c) - q, std::sqrt(sa * sa + 4.0 * sb * sb + sc * sc)};
    }

    if (std::abs(w) >= std::max(sigma_w, 1e-14)) {
      const double z = -q / w;
      // z = -q / w with dq/da = 1, dq/db = -1
      const double dz_da = -(1.0 * w - q * dw_da) / (w * w);
      const double dz_db = -(-1.0 * w - q * dw_db) / (w * w);
      const double dz_d2 = q * dw_d2 / (w * w);
      const double dz_d3 = q * dw_d3 / (w * w);
      const double sigma_z = std::sqrt(std::pow(dz_da * sa, 2) + std::pow(dz_db * sb, 2) +
                                        std::pow(dz_d2 * s2, 2) + std::pow(dz_d3 * s3, 2));
      r.zeta = Measured{z, sigma_z};
      r.zeta_flagged = z < 0.0 || z > 1.5;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace hbac
