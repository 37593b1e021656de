#include "fdirnet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdirnet/errors.hpp"

namespace fdirnet {

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

}  // namespace

RunOutput cmd_run(const Scenario& s, const RunOptions& opt, std::ostream& os) {
  RunOutput out;
  out.result = outer_scp(s.problem(), s.inner, s.outer, opt.threads);
  out.report = make_report(s, out.result);
  out.exit_code = out.result.degraded ? 2 : 0;

  if (opt.out_dir) {
    std::filesystem::create_directories(*opt.out_dir);
    {
      auto f = open_out(*opt.out_dir / "report.txt");
      write_report(f, out.report);
    }
    {
      auto f = open_out(*opt.out_dir / "outer.csv");
      write_outer_trace_csv(f, out.result.trace.outer);
    }
    for (std::size_t k = 1; k <= out.result.outer_iters; ++k) {
      std::vector<InnerRow> rows;
      for (const auto& r : out.result.trace.inner) {
        if (r.outer_iter == k) rows.push_back(r);
      }
      auto f = open_out(*opt.out_dir / ("trace_outer_" + std::to_string(k) + ".csv"));
      write_inner_trace_csv(f, rows);
    }
  }
  if (!opt.quiet) write_report(os, out.report);
  return out;
}

RankReport cmd_diagnose(const Scenario& s, std::ostream& os) {
  const MeasurementStack stack = s.stack();
  const BlockMat J = jacobian_stack(stack, s.reported_states());
  const RankReport r = search_space_dim(J);
  os << "n: " << r.cols << "\nm: " << r.rows << "\nrank k: " << r.rank
     << "\nsearch-space dimension n-k: " << r.dimension
     << "\nregular point: " << (r.rank == r.rows ? "yes" : "no") << "\nsingular values:";
  for (double sv : r.singular_values) os << ' ' << sv;
  os << '\n';
  return r;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "rho,outer_iters,inner_iters,identified,reconstruction_error,fastpath_fraction,"
        "first_fastpath_fraction,degraded\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) {
    os << r.rho << ',' << r.outer_iters << ',' << r.inner_iters << ',' << r.identified << ','
       << r.reconstruction_error << ',' << r.fastpath_fraction << ','
       << r.first_fastpath_fraction << ',' << (r.degraded ? 1 : 0) << '\n';
  }
  os.precision(old);
}

std::vector<SweepRow> cmd_sweep(const Scenario& s, const std::vector<double>& rhos,
                                const RunOptions& opt, std::ostream& os) {
  if (rhos.empty()) throw InvalidArgument("sweep: empty value list");
  std::vector<SweepRow> rows;
  const FdirProblem prob = s.problem();
  const std::size_t n = s.agents.size();
  for (double rho : rhos) {
    InnerParams inner = s.inner;
    inner.rho = rho;
    const ScpResult r = outer_scp(prob, inner, s.outer, opt.threads);
    const FaultReport rep = make_report(s, r);
    SweepRow row;
    row.rho = rho;
    row.outer_iters = r.outer_iters;
    row.inner_iters = r.inner_iters;
    row.identified = r.faults.size();
    row.reconstruction_error = rep.max_reconstruction_error;
    row.degraded = r.degraded;
    std::size_t fired = 0;
    for (const auto& ir : r.trace.inner) fired += ir.fastpath_count;
    if (!r.trace.inner.empty() && n > 0) {
      row.fastpath_fraction = double(fired) / double(r.trace.inner.size() * n);
      row.first_fastpath_fraction = double(r.trace.inner.front().fastpath_count) / double(n);
    }
    rows.push_back(row);
  }
  if (opt.out_dir) {
    std::filesystem::create_directories(*opt.out_dir);
    auto f = open_out(*opt.out_dir / "sweep.csv");
    write_sweep_csv(f, rows);
  }
  if (!opt.quiet || !opt.out_dir) write_sweep_csv(os, rows);
  return rows;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Fault detection, identification and reconstruction for agent networks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> rho;
  std::optional<std::size_t> max_outer;
  bool quiet = false;
  std::vector<double> values;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
    sub->add_option("--seed", seed, "Noise seed (overrides the file)");
    sub->add_flag("--quiet", quiet, "Suppress console output");
  };
  auto solver_flags = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--rho", rho, "ADMM penalty")->check(CLI::PositiveNumber);
    sub->add_option("--max-outer", max_outer, "Outer iteration budget")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Run detection and reconstruction");
  common(run);
  solver_flags(run);
  CLI::App* diag = app.add_subcommand("diagnose", "Jacobian rank at the reported configuration");
  common(diag);
  CLI::App* sweep = app.add_subcommand("sweep", "Repeat the run over a list of rho values");
  common(sweep);
  solver_flags(sweep);
  sweep->add_option("--values", values, "Comma-separated rho values")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Scenario s = load_scenario(scenario_path);
    if (seed) s.seed = *seed;
    if (rho) s.inner.rho = *rho;
    if (max_outer) s.outer.max_scp_iters = *max_outer;
    RunOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    opt.quiet = quiet;
    opt.threads = default_thread_count();

    std::ostringstream sink;
    std::ostream& os = quiet ? static_cast<std::ostream&>(sink) : std::cout;
    if (*run) return cmd_run(s, opt, os).exit_code;
    if (*diag) {
      cmd_diagnose(s, os);
      return 0;
    }
    const auto rows = cmd_sweep(s, values, opt, os);
    return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.degraded; }) ? 2
                                                                                                 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fdirnet
