// Deterministic CSV / JSON serialization and gnuplot script generation.
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbac/engine.hpp"
#include "hbac/expdata.hpp"

namespace hbac::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kCycleHeader = "n,eps1,eps2_tilde,eps3_tilde,Q,W,J,zeta,T_c,zeta_C";
inline constexpr const char* kExperimentalHeader =
    "n,Q,sigma_Q,W,sigma_W,J,sigma_J,zeta,sigma_zeta,zeta_flag";

/// 12 significant digits, lowercase scientific; +inf as "inf".
inline std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // fold -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", x);
  return buf;
}

inline std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string{}; }

/// Value rounded to the 12 digits written to CSV, so JSON and CSV agree.
inline json json_num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return std::strtod(num(x).c_str(), nullptr);
}

inline json json_num(const std::optional<double>& x) { return x ? json_num(*x) : json(nullptr); }

inline void write_cycle_rows(std::ostream& os, const std::vector<CycleRecord>& records) {
  for (const auto& r : records)
    os << r.n << ',' << num(r.eps1) << ',' << num(r.eps2_tilde) << ',' << num(r.eps3_tilde) << ','
       << num(r.Q) << ',' << num(r.W) << ',' << num(r.J) << ',' << num(r.zeta) << ',' << num(r.T_c)
       << ',' << num(r.zeta_carnot) << '\n';
}

inline void write_cycle_csv(std::ostream& os, const std::vector<CycleRecord>& records) {
  os << kCycleHeader << '\n';
  write_cycle_rows(os, records);
}

inline json config_json(const RefrigeratorConfig& c) {
  return json{{"gamma", json_num(c.gamma())},   {"theta", json_num(c.theta())},
              {"eps1_0", json_num(c.eps1_0())}, {"eps2_0", json_num(c.eps2_0())},
              {"eps3_0", json_num(c.eps3_0())}, {"cycles", c.cycles()},
              {"variant", std::string(to_string(c.variant()))}};
}

inline json cycle_records_json(const std::vector<CycleRecord>& records) {
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back(json{{"n", r.n},
                       {"eps1", json_num(r.eps1)},
                       {"eps2_tilde", json_num(r.eps2_tilde)},
                       {"eps3_tilde", json_num(r.eps3_tilde)},
                       {"Q", json_num(r.Q)},
                       {"W", json_num(r.W)},
                       {"J", json_num(r.J)},
                       {"zeta", json_num(r.zeta)},
                       {"T_c", json_num(r.T_c)},
                       {"zeta_C", json_num(r.zeta_carnot)}});
  return arr;
}

inline void write_experimental_csv(std::ostream& os, const std::vector<ExperimentalRecord>& records) {
  os << kExperimentalHeader << '\n';
  for (const auto& r : records) {
    os << r.n << ',' << num(r.Q.value) << ',' << num(r.Q.sigma) << ',' << num(r.W.value) << ','
       << num(r.W.sigma) << ',';
    if (r.J) os << num(r.J->value) << ',' << num(r.J->sigma);
    else os << ',';
    os << ',';
    if (r.zeta) os << num(r.zeta->value) << ',' << num(r.zeta->sigma);
    else os << ',';
    os << ',' << (r.zeta_flagged ? 1 : 0) << '\n';
  }
}

inline json experimental_json(const std::vector<ExperimentalRecord>& records) {
  auto measured = [](const std::optional<Measured>& m) {
    return m ? json{{"value", json_num(m->value)}, {"sigma", json_num(m->sigma)}} : json(nullptr);
  };
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back(json{{"n", r.n},
                       {"Q", measured(r.Q)},
                       {"W", measured(r.W)},
                       {"J", measured(r.J)},
                       {"zeta", measured(r.zeta)},
                       {"zeta_flag", r.zeta_flagged}});
  return arr;
}

/// Round-trip precision for files that are read back in.
inline std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Measurement-series file (the analyze input format) for a simulated run,
/// eps1(n) for n = 0..eps1.size() - 1 with zero uncertainty.
inline void write_series(std::ostream& os, const RefrigeratorConfig& cfg, const std::vector<double>& eps1) {
  os << "# simulated target polarization, variant " << to_string(cfg.variant()) << '\n'
     << "gamma=" << exact(cfg.gamma()) << '\n'
     << "theta=" << exact(cfg.theta()) << '\n'
     << "eps2_0=" << exact(cfg.eps2_0()) << '\n'
     << "eps3_0=" << exact(cfg.eps3_0()) << '\n'
     << "n,eps1,sigma_eps1\n";
  for (std::size_t n = 0; n < eps1.size(); ++n) os << n << ',' << exact(eps1[n]) << ",0\n";
}

// gnuplot scripts carry their data inline as datablocks.

struct LabeledRecords {
  std::string title;
  std::vector<CycleRecord> records;
};

inline void write_cycle_plot(std::ostream& os, const std::vector<LabeledRecords>& blocks,
                             const std::string& output_name) {
  os << "# gnuplot script: COP, cooling power and target polarization per cycle\n"
     << "set terminal pngcairo size 1500,450\n"
     << "set output '" << output_name << "'\n"
     << "set datafile separator ','\n"
     << "set datafile missing ''\n"
     << "set key top right\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    os << "$run" << b << " << EOD\n";
    write_cycle_rows(os, blocks[b].records);
    os << "EOD\n";
  }
  os << "set multiplot layout 1,3\n";
  const char* panels[][3] = {{"zeta", "8", "COP zeta(n)"}, {"J", "7", "cooling power J(n)"},
                             {"eps1", "2", "target polarization eps1(n)"}};
  for (const auto& panel : panels) {
    os << "set title '" << panel[2] << "'\nset xlabel 'n'\nplot ";
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      if (b > 0) os << ", ";
      os << "$run" << b << " using 1:" << panel[1] << " with linespoints title '" << blocks[b].title << "'";
    }
    os << '\n';
  }
  os << "unset multiplot\n";
}

inline void write_experimental_plot(std::ostream& os, const std::vector<ExperimentalRecord>& records,
                                    const std::string& output_name) {
  os << "# gnuplot script: measured heat, cooling power and COP with error bars\n"
     << "set terminal pngcairo size 1500,450\n"
     << "set output '" << output_name << "'\n"
     << "set datafile separator ','\n"
     << "set datafile missing ''\n"
     << "$data << EOD\n";
  for (const auto& r : records) {
    os << r.n << ',' << num(r.Q.value) << ',' << num(r.Q.sigma) << ',' << num(r.W.value) << ','
       << num(r.W.sigma) << ',' << (r.J ? num(r.J->value) : "") << ','
       << (r.J ? num(r.J->sigma) : "") << ',' << (r.zeta ? num(r.zeta->value) : "") << ','
       << (r.zeta ? num(r.zeta->sigma) : "") << '\n';
  }
  os << "EOD\n"
     << "set multiplot layout 1,3\n"
     << "set xlabel 'n'\n"
     << "set title 'heat Q(n)'\nplot $data using 1:2:3 with yerrorbars title 'Q'\n"
     << "set title 'cooling power J(n)'\nplot $data using 1:6:7 with yerrorbars title 'J'\n"
     << "set title 'COP zeta(n)'\nplot $data using 1:8:9 with yerrorbars title 'zeta'\n"
     << "unset multiplot\n";
}

}  // namespace hbac::report
