#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fdirnet/measurements.hpp"
#include "fdirnet/scenario.hpp"

namespace fdirnet {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool quiet = false;
  std::size_t threads = 0;
};

struct RunOutput {
  ScpResult result;
  FaultReport report;
  int exit_code = 0;  // 0 converged, 2 degraded
};

// Writes report.txt, outer.csv and trace_outer_<k>.csv (one per outer
// iteration) when out_dir is set; prints the report unless quiet.
RunOutput cmd_run(const Scenario& s, const RunOptions& opt, std::ostream& os);

// Rank of the measurement Jacobian at the reported configuration.
RankReport cmd_diagnose(const Scenario& s, std::ostream& os);

struct SweepRow {
  double rho = 0.0;
  std::size_t outer_iters = 0;
  std::size_t inner_iters = 0;
  std::size_t identified = 0;
  double reconstruction_error = 0.0;
  double fastpath_fraction = 0.0;        // over all agent-iterations
  double first_fastpath_fraction = 0.0;  // first inner iteration from zero duals
  bool degraded = false;
};

// One run per rho value; writes sweep.csv to out_dir when set, else to os.
std::vector<SweepRow> cmd_sweep(const Scenario& s, const std::vector<double>& rhos,
                                const RunOptions& opt, std::ostream& os);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Entry point for tools/fdirnet. Returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace fdirnet
