// Command-line surface: simulate, sweep, optimize-theta, audit, analyze.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "hbac/audit.hpp"
#include "hbac/closedform.hpp"
#include "hbac/engine.hpp"
#include "hbac/expdata.hpp"
#include "hbac/report.hpp"

namespace hbac::cli {

enum class Verb { Simulate, Sweep, OptimizeTheta, Audit, Analyze };
enum class Format { Csv, Json };

/// Bad command line; the tool exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Command {
  Verb verb = Verb::Simulate;
  RefrigeratorConfig config;
  std::vector<double> grid_gamma;
  std::vector<double> grid_theta;
  int n_max = 6;
  std::string data_path;
  std::string out_path;    // empty: standard output
  std::string series_out;  // simulate only
  Format format = Format::Csv;
  bool plot = false;
};

inline constexpr double kThetaGridStep = 1e-4;

namespace detail {

struct RawArgs {
  double gamma = 0.0;
  double theta = std::numbers::pi / 2;
  double eps1 = 0.0;
  double eps2 = 0.6;
  double eps3 = 0.6;
  int cycles = 20;
  int n = 6;
  std::string variant = "random-unitary";
  std::string format = "csv";
  std::string out;
  std::string data;
  std::string series_out;
  std::vector<double> grid_gamma;
  std::vector<double> grid_theta;
  bool plot = false;
};

inline void add_output(CLI::App* sub, RawArgs& a) {
  sub->add_option("--out", a.out, "output file (default: standard output)");
  sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

inline void add_polarizations(CLI::App* sub, RawArgs& a) {
  sub->add_option("--eps1", a.eps1, "initial target polarization")->check(CLI::Range(-1.0, 1.0));
  sub->add_option("--eps2", a.eps2, "reset qubit 2 polarization")->check(CLI::Range(-1.0, 1.0));
  sub->add_option("--eps3", a.eps3, "reset qubit 3 polarization")->check(CLI::Range(-1.0, 1.0));
}

inline void add_gamma(CLI::App* sub, RawArgs& a) {
  sub->add_option("--gamma", a.gamma, "target damping probability per cycle")->check(CLI::Range(0.0, 1.0));
}

inline void add_cycle_options(CLI::App* sub, RawArgs& a) {
  add_gamma(sub, a);
  sub->add_option("--theta", a.theta, "compression mixing angle")->check(CLI::Range(0.0, std::numbers::pi));
  add_polarizations(sub, a);
  sub->add_option("--cycles", a.cycles, "number of cycles")->check(CLI::NonNegativeNumber);
  sub->add_option("--variant", a.variant, "compression channel")
      ->check(CLI::IsMember({"random-unitary", "kraus-uncorrected", "kraus-corrected"}));
}

inline void add_grids(CLI::App* sub, RawArgs& a, bool required) {
  auto* g = sub->add_option("--grid-gamma", a.grid_gamma, "comma-separated gamma values")
                ->delimiter(',')
                ->check(CLI::Range(0.0, 1.0));
  auto* t = sub->add_option("--grid-theta", a.grid_theta, "comma-separated theta values")
                ->delimiter(',')
                ->check(CLI::Range(0.0, std::numbers::pi));
  if (required) {
    g->required();
    t->required();
  }
}

inline std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::size_t thread_count() {
  if (const char* env = std::getenv("HBAC_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw UsageError(std::string("HBAC_THREADS='") + env + "' is not a positive integer");
    return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to thread_count() workers. Results
/// must be written to per-index slots; the first exception is rethrown.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void emit(const Command& cmd, const std::string& text, std::ostream& out) {
  if (cmd.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cmd.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + cmd.out_path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + cmd.out_path + "' failed");
}

inline void emit_plot(const Command& cmd, const std::function<void(std::ostream&, const std::string&)>& writer) {
  std::ostringstream script;
  writer(script, cmd.out_path + ".png");
  const std::string path = cmd.out_path + ".gp";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << script.str();
}

inline std::string dump(const report::json& j) { return j.dump(2) + "\n"; }

inline std::string render_simulate(const Command& cmd, std::vector<CycleRecord>& records) {
  records = run_cycles(cmd.config);
  if (cmd.format == Format::Json)
    return dump({{"config", report::config_json(cmd.config)}, {"records", report::cycle_records_json(records)}});
  std::ostringstream os;
  report::write_cycle_csv(os, records);
  return os.str();
}

inline void write_series_file(const Command& cmd, const std::vector<CycleRecord>& records) {
  std::vector<double> eps1;
  for (const auto& r : records) eps1.push_back(r.eps1);
  if (!records.empty()) eps1.push_back(records.back().eps1 - records.back().Q);
  std::ofstream f(cmd.series_out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + cmd.series_out + "' for writing");
  report::write_series(f, cmd.config, eps1);
}

inline int run_simulate(const Command& cmd, std::ostream& out) {
  std::vector<CycleRecord> records;
  emit(cmd, render_simulate(cmd, records), out);
  if (!cmd.series_out.empty()) write_series_file(cmd, records);
  if (cmd.plot) {
    const std::string title = "gamma=" + report::num(cmd.config.gamma()) + " theta=" + report::num(cmd.config.theta());
    emit_plot(cmd, [&](std::ostream& os, const std::string& png) {
      report::write_cycle_plot(os, {{title, records}}, png);
    });
  }
  return 0;
}

inline int run_sweep(const Command& cmd, std::ostream& out) {
  const auto gammas = sorted_unique(cmd.grid_gamma);
  const auto thetas = sorted_unique(cmd.grid_theta);
  struct Point {
    double gamma, theta;
    std::vector<CycleRecord> records;
  };
  std::vector<Point> points;
  for (double g : gammas)
    for (double t : thetas) points.push_back({g, t, {}});

  const auto& c = cmd.config;
  parallel_for(points.size(), [&](std::size_t i) {
    const RefrigeratorConfig cfg(points[i].gamma, points[i].theta, c.eps1_0(), c.eps2_0(), c.eps3_0(),
                                 c.cycles(), c.variant());
    points[i].records = run_cycles(cfg);
  });

  std::string text;
  if (cmd.format == Format::Json) {
    report::json arr = report::json::array();
    for (const auto& p : points)
      arr.push_back({{"gamma", report::json_num(p.gamma)},
                     {"theta", report::json_num(p.theta)},
                     {"records", report::cycle_records_json(p.records)}});
    text = dump({{"config", report::config_json(c)}, {"points", arr}});
  } else {
    std::ostringstream os;
    os << report::kCycleHeader << '\n';
    for (const auto& p : points) {
      os << "# gamma=" << report::num(p.gamma) << ",theta=" << report::num(p.theta) << '\n';
      report::write_cycle_rows(os, p.records);
    }
    text = os.str();
  }
  emit(cmd, text, out);

  if (cmd.plot) {
    std::vector<report::LabeledRecords> blocks;
    for (const auto& p : points)
      blocks.push_back({"gamma=" + report::num(p.gamma) + " theta=" + report::num(p.theta), p.records});
    emit_plot(cmd, [&](std::ostream& os, const std::string& png) { report::write_cycle_plot(os, blocks, png); });
  }
  return 0;
}

struct ThetaRow {
  int n;
  double theta_opt;
  double j_at_opt;
  double theta_grid;
  double j_grid;
  bool in_region;
};

inline std::vector<ThetaRow> optimize_theta_table(const RefrigeratorConfig& c, int n_max) {
  const auto steps = static_cast<std::size_t>(std::floor(std::numbers::pi / kThetaGridStep));
  std::vector<double> grid;
  for (std::size_t k = 0; k <= steps; ++k) grid.push_back(static_cast<double>(k) * kThetaGridStep);
  grid.push_back(std::numbers::pi);

  std::vector<std::vector<double>> j_grid(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    j_grid[k] = cooling_power_series({c.gamma(), grid[k], c.eps2_0(), c.eps3_0()}, c.eps1_0(), n_max);
  });

  std::vector<ThetaRow> rows;
  for (int n = 0; n <= n_max; ++n) {
    const double th = optimal_theta(n, c.eps1_0(), c.eps2_0(), c.eps3_0());
    const double j = cooling_power_series({c.gamma(), th, c.eps2_0(), c.eps3_0()}, c.eps1_0(), n).back();
    std::size_t best = 0;
    for (std::size_t k = 1; k < grid.size(); ++k)
      if (j_grid[k][n] > j_grid[best][n]) best = k;
    rows.push_back({n, th, j, grid[best], j_grid[best][n], in_pi_half_region(c.eps1_0(), c.eps2_0(), c.eps3_0())});
  }
  return rows;
}

inline int run_optimize(const Command& cmd, std::ostream& out) {
  const auto rows = optimize_theta_table(cmd.config, cmd.n_max);
  // The analytic angle is confirmed when no grid angle does better.
  auto confirmed = [](const ThetaRow& r) { return r.j_at_opt >= r.j_grid - 1e-12; };
  std::string text;
  if (cmd.format == Format::Json) {
    report::json arr = report::json::array();
    for (const auto& r : rows)
      arr.push_back({{"n", r.n},
                     {"theta_opt", report::json_num(r.theta_opt)},
                     {"J_theta_opt", report::json_num(r.j_at_opt)},
                     {"theta_grid", report::json_num(r.theta_grid)},
                     {"J_grid", report::json_num(r.j_grid)},
                     {"confirmed", confirmed(r)}});
    text = dump({{"config", report::config_json(cmd.config)},
                 {"pi_half_region", rows.empty() ? false : rows.front().in_region},
                 {"rows", arr}});
  } else {
    std::ostringstream os;
    os << "n,theta_opt,J_theta_opt,theta_grid,J_grid,confirmed\n";
    for (const auto& r : rows)
      os << r.n << ',' << report::num(r.theta_opt) << ',' << report::num(r.j_at_opt) << ','
         << report::num(r.theta_grid) << ',' << report::num(r.j_grid) << ',' << (confirmed(r) ? 1 : 0) << '\n';
    text = os.str();
  }
  emit(cmd, text, out);
  return 0;
}

inline int run_audit_verb(const Command& cmd, std::ostream& out, std::ostream& err) {
  AuditSpec spec;
  const auto& c = cmd.config;
  spec.gammas = cmd.grid_gamma.empty() ? std::vector<double>{c.gamma()} : cmd.grid_gamma;
  spec.thetas = cmd.grid_theta.empty() ? std::vector<double>{c.theta()} : cmd.grid_theta;
  spec.eps1_0 = c.eps1_0();
  spec.eps2_0 = c.eps2_0();
  spec.eps3_0 = c.eps3_0();
  spec.cycles = c.cycles();
  const auto rows = run_audit(spec);

  std::string text;
  if (cmd.format == Format::Json) {
    report::json arr = report::json::array();
    for (const auto& r : rows)
      arr.push_back({{"formula", r.formula},
                     {"class", r.row_class},
                     {"gamma", report::json_num(r.gamma)},
                     {"theta", report::json_num(r.theta)},
                     {"eps1_0", report::json_num(r.eps1_0)},
                     {"eps2_0", report::json_num(r.eps2_0)},
                     {"eps3_0", report::json_num(r.eps3_0)},
                     {"n", r.n},
                     {"closed_form", report::json_num(r.closed_form)},
                     {"numeric", report::json_num(r.numeric)},
                     {"abs_diff", report::json_num(r.abs_diff())}});
    text = dump(arr);
  } else {
    std::ostringstream os;
    os << "formula,class,gamma,theta,eps1_0,eps2_0,eps3_0,n,closed_form,numeric,abs_diff\n";
    for (const auto& r : rows)
      os << r.formula << ',' << r.row_class << ',' << report::num(r.gamma) << ',' << report::num(r.theta) << ','
         << report::num(r.eps1_0) << ',' << report::num(r.eps2_0) << ',' << report::num(r.eps3_0) << ',' << r.n
         << ',' << report::num(r.closed_form) << ',' << report::num(r.numeric) << ','
         << report::num(r.abs_diff()) << '\n';
    text = os.str();
  }
  emit(cmd, text, out);

  std::size_t trusted_bad = 0, printed_bad = 0;
  for (const auto& r : rows) {
    const auto d = r.abs_diff();
    const bool off = !d || *d > kTrustedTolerance;
    if (r.row_class == "trusted" && off) ++trusted_bad;
    if (r.row_class == "as-printed" && off) ++printed_bad;
  }
  err << "audit: " << rows.size() << " rows, " << trusted_bad << " trusted above 1e-9, " << printed_bad
      << " as-printed above 1e-9\n";
  return 0;
}

inline int run_analyze(const Command& cmd, std::ostream& out) {
  std::ifstream in(cmd.data_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + cmd.data_path + "'");
  const auto records = analyze(parse_series(in));
  std::string text;
  if (cmd.format == Format::Json) {
    text = dump(report::experimental_json(records));
  } else {
    std::ostringstream os;
    report::write_experimental_csv(os, records);
    text = os.str();
  }
  emit(cmd, text, out);
  if (cmd.plot)
    emit_plot(cmd, [&](std::ostream& os, const std::string& png) { report::write_experimental_plot(os, records, png); });
  return 0;
}

}  // namespace detail

/// Parses arguments without the program name.
inline Command parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Heat-bath algorithmic cooling refrigerator simulator", "hbac"};
  app.require_subcommand(1);
  detail::RawArgs a;

  auto* sim = app.add_subcommand("simulate", "cycle-by-cycle thermodynamic record");
  detail::add_cycle_options(sim, a);
  detail::add_output(sim, a);
  sim->add_flag("--plot", a.plot, "also write <out>.gp");
  sim->add_option("--series-out", a.series_out, "write eps1(n) in the analyze input format");

  auto* sweep = app.add_subcommand("sweep", "records for every (gamma, theta) grid point");
  detail::add_cycle_options(sweep, a);
  detail::add_grids(sweep, a, true);
  detail::add_output(sweep, a);
  sweep->add_flag("--plot", a.plot, "also write <out>.gp");

  auto* opt = app.add_subcommand("optimize-theta", "optimal compression angle per cycle");
  detail::add_gamma(opt, a);
  detail::add_polarizations(opt, a);
  opt->add_option("--n", a.n, "largest cycle index")->check(CLI::NonNegativeNumber);
  detail::add_output(opt, a);

  auto* audit = app.add_subcommand("audit", "closed forms against channel propagation");
  detail::add_cycle_options(audit, a);
  detail::add_grids(audit, a, false);
  detail::add_output(audit, a);

  auto* an = app.add_subcommand("analyze", "heat, work, cooling power and COP of a measured series");
  an->add_option("--data", a.data, "measurement series file")->required();
  detail::add_output(an, a);
  an->add_flag("--plot", a.plot, "also write <out>.gp");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  Command cmd;
  if (sim->parsed()) cmd.verb = Verb::Simulate;
  else if (sweep->parsed()) cmd.verb = Verb::Sweep;
  else if (opt->parsed()) cmd.verb = Verb::OptimizeTheta;
  else if (audit->parsed()) cmd.verb = Verb::Audit;
  else cmd.verb = Verb::Analyze;

  try {
    cmd.config = RefrigeratorConfig(a.gamma, a.theta, a.eps1, a.eps2, a.eps3, a.cycles, parse_variant(a.variant));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cmd.grid_gamma = a.grid_gamma;
  cmd.grid_theta = a.grid_theta;
  if (cmd.verb == Verb::Sweep && (cmd.grid_gamma.empty() || cmd.grid_theta.empty()))
    throw UsageError("--grid-gamma and --grid-theta must be non-empty");
  cmd.n_max = a.n;
  cmd.data_path = a.data;
  cmd.out_path = a.out;
  cmd.series_out = a.series_out;
  cmd.format = a.format == "json" ? Format::Json : Format::Csv;
  cmd.plot = a.plot;
  if (cmd.plot && cmd.out_path.empty()) throw UsageError("--plot requires --out");
  return cmd;
}

/// Runs a command; output goes to cmd.out_path or `out`, diagnostics to `err`.
inline int execute(const Command& cmd, std::ostream& out, std::ostream& err) {
  switch (cmd.verb) {
    case Verb::Simulate: return detail::run_simulate(cmd, out);
    case Verb::Sweep: return detail::run_sweep(cmd, out);
    case Verb::OptimizeTheta: return detail::run_optimize(cmd, out);
    case Verb::Audit: return detail::run_audit_verb(cmd, out, err);
    case Verb::Analyze: return detail::run_analyze(cmd, out);
  }
  return 1;
}

/// Exit status: 0 success, 1 runtime failure, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(parse_args(args), out, err);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "hbac: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const std::exception& e) {
    err << "hbac: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hbac::cli
