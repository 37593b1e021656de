#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdirnet/cli.hpp"
#include "fdirnet/errors.hpp"

using namespace fdirnet;
namespace fs = std::filesystem;

namespace {

const fs::path kData = FDIRNET_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fdirnet_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("run on a fault-free scenario") {
  const Scenario s = load_scenario(kData / "distance8_clean.json");
  std::ostringstream os;
  const RunOutput out = cmd_run(s, {}, os);
  CHECK(out.exit_code == 0);
  CHECK(out.report.identified.empty());
  CHECK(os.str().find("identified faults: {}") != std::string::npos);
}

TEST_CASE("run identifies the planted fault and is reproducible") {
  const Scenario s = load_scenario(kData / "distance8_fault.json");
  const fs::path a = scratch("a"), b = scratch("b");
  std::ostringstream os;
  RunOptions opt;
  opt.quiet = true;
  opt.out_dir = a;
  const RunOutput out = cmd_run(s, opt, os);
  CHECK(os.str().empty());
  CHECK(out.exit_code == 0);
  CHECK(out.report.identified == std::vector<std::size_t>{3});
  CHECK(out.report.precision == 1.0);
  CHECK(out.report.recall == 1.0);
  opt.out_dir = b;
  opt.threads = 3;
  cmd_run(s, opt, os);
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
  }
  CHECK(fs::exists(a / "trace_outer_1.csv"));
  CHECK(slurp(a / "trace_outer_1.csv").rfind("outer_iter,inner_iter,max_c_norm", 0) == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("diagnose reports rank") {
  Scenario s = parse_scenario(R"({"dimension": 2,
    "agents": [{"id": 0, "true_state": [0, 0]}, {"id": 1, "true_state": [3, 4]}],
    "edges": [{"kind": "distance", "members": [0, 1]}]})");
  std::ostringstream os;
  RankReport r = cmd_diagnose(s, os);
  CHECK(r.cols == 4);
  CHECK(r.rank == 1);
  CHECK(r.dimension == 3);
  s.edges.clear();
  CHECK(cmd_diagnose(s, os).rank == 0);
  CHECK(cmd_diagnose(load_scenario(kData / "triangle.json"), os).rank == 3);
}

TEST_CASE("sweep emits one row per value") {
  const Scenario s = load_scenario(kData / "distance8_fault.json");
  std::ostringstream os;
  const auto rows = cmd_sweep(s, {0.5, 1.0, 4.0}, {}, os);
  REQUIRE(rows.size() == 3);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(rows[0].first_fastpath_fraction >= rows[1].first_fastpath_fraction);
  CHECK(rows[1].first_fastpath_fraction >= rows[2].first_fastpath_fraction);
  const auto single = cmd_sweep(s, {1.0}, {}, os);
  RunOptions quiet;
  quiet.quiet = true;
  const RunOutput run = cmd_run(s, quiet, os);
  CHECK(single[0].inner_iters == run.result.inner_iters);
  CHECK(single[0].identified == run.report.identified.size());
  CHECK_THROWS_AS(cmd_sweep(s, {}, {}, os), InvalidArgument);
}

TEST_CASE("command line entry point") {
  const std::string scen = (kData / "distance8_fault.json").string();
  const fs::path out = scratch("argv");
  std::vector<std::string> args = {"fdirnet", "run", "--scenario", scen, "--out", out.string(),
                                   "--quiet", "--rho", "1.0", "--max-outer", "10", "--seed", "3"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 0);
  CHECK(fs::exists(out / "report.txt"));
  fs::remove_all(out);

  std::vector<std::string> missing = {"fdirnet", "run", "--scenario", "/nonexistent.json", "--quiet"};
  argv.clear();
  for (auto& a : missing) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 1);

  std::vector<std::string> degraded = {"fdirnet", "run", "--scenario", scen, "--quiet",
                                       "--max-outer", "1"};
  argv.clear();
  for (auto& a : degraded) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 2);
}
