#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"

#include "hbac/cli.hpp"

using namespace hbac;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

namespace {

namespace fs = std::filesystem;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  if (!line.empty() && line.back() == ',') v.emplace_back();
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hbac_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("defaults and the experimental parameter set", "[cli]") {
  const auto d = cli::parse_args({"simulate"});
  CHECK(d.verb == cli::Verb::Simulate);
  CHECK(d.config.cycles() == 20);
  CHECK(d.config.theta() == std::numbers::pi / 2);
  CHECK(d.format == cli::Format::Csv);

  const auto e = cli::parse_args(
      {"simulate", "--gamma", "1e-4", "--theta", "0.924", "--eps2", "0.58", "--eps3", "0.41", "--cycles", "8"});
  CHECK(e.config.gamma() == 1e-4);
  CHECK(e.config.eps3_0() == 0.41);
  CHECK(e.config.cycles() == 8);

  const auto o = cli::parse_args({"optimize-theta", "--eps2", "0.2", "--eps3", "0.2", "--n", "4", "--format", "json"});
  CHECK(o.verb == cli::Verb::OptimizeTheta);
  CHECK(o.n_max == 4);
  CHECK(o.format == cli::Format::Json);
}

TEST_CASE("usage errors exit with status 2", "[cli]") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"simulate", "--gamma", "2"},
           {"simulate", "--theta", "-1"},
           {"simulate", "--cycles", "-3"},
           {"simulate", "--bogus"},
           {"simulate", "--gamma"},
           {"simulate", "--variant", "verbatim"},
           {"simulate", "--format", "xml"},
           {"simulate", "--plot"},
           {"sweep", "--grid-gamma", "0"},
           {"analyze"},
           {"frobnicate"},
       }) {
    const auto r = run(args);
    CHECK(r.status == 2);
    CHECK_THAT(r.err, StartsWith("hbac: "));
  }
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("thread count from the environment", "[cli]") {
  ::setenv("HBAC_THREADS", "3", 1);
  CHECK(cli::detail::thread_count() == 3);
  ::setenv("HBAC_THREADS", "zero", 1);
  CHECK_THROWS_AS(cli::detail::thread_count(), cli::UsageError);
  ::setenv("HBAC_THREADS", "0", 1);
  CHECK_THROWS_AS(cli::detail::thread_count(), cli::UsageError);
  ::unsetenv("HBAC_THREADS");
  CHECK(cli::detail::thread_count() >= 1);
}

TEST_CASE("simulate writes one CSV row per cycle", "[cli]") {
  const auto r = run({"simulate"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 21);
  CHECK(ls[0] == report::kCycleHeader);
  CHECK_THAT(ls[1], StartsWith("0,0.00000000000e+00,"));
  for (std::size_t k = 1; k < ls.size(); ++k) CHECK(fields(ls[k])[7] == "1.00000000000e+00");
  CHECK_THAT(fields(ls[20])[1], StartsWith("8.8235"));
}

TEST_CASE("undefined COP is an empty field and a JSON null", "[cli]") {
  const auto csv = run({"simulate", "--theta", "0", "--cycles", "2"});
  CHECK(fields(lines(csv.out)[1])[7].empty());
  const auto json = report::json::parse(run({"simulate", "--theta", "0", "--cycles", "2", "--format", "json"}).out);
  CHECK(json["records"][0]["zeta"].is_null());
  CHECK(json["config"]["cycles"] == 2);
}

TEST_CASE("uncorrected variant fails at run time", "[cli]") {
  const auto r = run({"simulate", "--variant", "kraus-uncorrected", "--theta", "1"});
  CHECK(r.status == 1);
  CHECK_THAT(r.err, ContainsSubstring("kraus-uncorrected"));
}

TEST_CASE("sweep blocks are ordered by gamma then theta", "[cli]") {
  const auto r = run({"sweep", "--grid-gamma", "0.1,0", "--grid-theta", "1.5,0.5,1.5", "--cycles", "2"});
  REQUIRE(r.status == 0);
  std::vector<std::string> blocks;
  for (const auto& l : lines(r.out))
    if (l.starts_with("# ")) blocks.push_back(l);
  REQUIRE(blocks.size() == 4);
  CHECK_THAT(blocks[0], ContainsSubstring("gamma=0.00000000000e+00,theta=5.00000000000e-01"));
  CHECK_THAT(blocks[1], ContainsSubstring("gamma=0.00000000000e+00,theta=1.50000000000e+00"));
  CHECK_THAT(blocks[3], ContainsSubstring("gamma=1.00000000000e-01,theta=1.50000000000e+00"));
}

TEST_CASE("output does not depend on the thread count", "[cli]") {
  const std::vector<std::string> args = {"sweep", "--grid-gamma", "0,0.01,0.1", "--grid-theta", "0.5,1,1.5"};
  ::setenv("HBAC_THREADS", "1", 1);
  const auto one = run(args);
  ::setenv("HBAC_THREADS", "8", 1);
  const auto eight = run(args);
  ::unsetenv("HBAC_THREADS");
  CHECK(one.out == eight.out);
}

TEST_CASE("optimize-theta confirms the analytic angle", "[cli]") {
  const auto r = run({"optimize-theta", "--eps2", "0.2", "--eps3", "0.2"});
  REQUIRE(r.status == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  for (std::size_t k = 1; k < ls.size(); ++k) CHECK(fields(ls[k])[5] == "1");
}

TEST_CASE("audit separates trusted and as-printed rows", "[cli]") {
  const auto r = run({"audit", "--grid-gamma", "0", "--grid-theta", "1.5707963267948966", "--cycles", "5"});
  REQUIRE(r.status == 0);
  CHECK_THAT(r.err, ContainsSubstring(" 0 trusted above 1e-9"));
  bool reset_row = false;
  for (const auto& l : lines(r.out)) {
    const auto f = fields(l);
    if (f[0] == "reset2_polarization_general" && f[7] == "1") {
      reset_row = true;
      CHECK(f[8] == "-1.00000000000e-01");
    }
  }
  CHECK(reset_row);
}

TEST_CASE("simulate series feeds analyze", "[cli]") {
  const auto series = scratch("series.txt");
  const auto analyzed = scratch("analyzed.csv");
  REQUIRE(run({"simulate", "--gamma", "1e-4", "--theta", "0.924", "--eps2", "0.58", "--eps3", "0.41", "--cycles", "8",
               "--series-out", series.string()})
              .status == 0);
  const auto r = run({"analyze", "--data", series.string(), "--out", analyzed.string(), "--plot"});
  REQUIRE(r.status == 0);
  const auto ls = lines(slurp(analyzed));
  REQUIRE(ls.size() == 9);
  CHECK(ls[0] == report::kExperimentalHeader);
  CHECK(fs::exists(analyzed.string() + ".gp"));
  CHECK_THAT(slurp(analyzed.string() + ".gp"), ContainsSubstring("set output"));

  CHECK(run({"analyze", "--data", scratch("missing.txt").string()}).status == 1);
}

TEST_CASE("installed binary", "[cli]") {
  const auto out = scratch("binary.csv");
  const std::string exe = HBAC_CLI_PATH;
  CHECK(std::system((exe + " simulate --cycles 3 --out " + out.string()).c_str()) == 0);
  CHECK(lines(slurp(out)).size() == 4);
  const int status = std::system((exe + " simulate --gamma 2 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
