// Command-line front end: solve one problem or benchmark a directory.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "synrg/driver.h"
#include "synrg/sygus_io.h"

namespace {

using synrg::PipelineConfig;

std::chrono::milliseconds secs_to_ms(double s) {
  return std::chrono::milliseconds(static_cast<long long>(s * 1000.0));
}

std::string env_or_empty(const char *name) {
  const char *v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

struct CommonFlags {
  int bound_start = 2, bound_max = 8, bound_step = 1;
  double fast_secs = 2.0, template_secs = 60.0, total_secs = 300.0;
  std::string synth_solver, smt_solver;
  bool internal_only = false;
  bool accept_unverified = false;
  bool trace_generalization = false;
  bool json = false;

  void attach(CLI::App *cmd) {
    cmd->add_option("--bound-start", bound_start, "initial array bound");
    cmd->add_option("--bound-max", bound_max, "largest array bound tried");
    cmd->add_option("--bound-step", bound_step, "bound increment");
    cmd->add_option("--fast-timeout", fast_secs,
                    "seconds for the grammar-free synthesis pass");
    cmd->add_option("--template-timeout", template_secs,
                    "seconds for the templated synthesis pass");
    cmd->add_option("--total-timeout", total_secs, "overall budget in seconds");
    cmd->add_option("--synth-solver", synth_solver,
                    "external SyGuS solver command (default: "
                    "$SYNRG_SYNTH_SOLVER)");
    cmd->add_option("--smt-solver", smt_solver,
                    "external SMT solver command (default: $SYNRG_SMT_SOLVER)");
    cmd->add_flag("--internal-only", internal_only,
                  "ignore external solvers and environment overrides");
    cmd->add_flag("--accept-unverified", accept_unverified,
                  "report an unverified candidate instead of failing");
    cmd->add_flag("--trace-generalization", trace_generalization,
                  "log generalization decisions to stderr");
    cmd->add_flag("--json", json, "print the full run report as JSON");
  }

  PipelineConfig config(std::ostream *trace_sink) const {
    PipelineConfig cfg;
    cfg.bound.b_start = bound_start;
    cfg.bound.b_max = bound_max;
    cfg.bound.step = bound_step;
    cfg.total_timeout = secs_to_ms(total_secs);
    cfg.template_synth_timeout =
        std::min(secs_to_ms(template_secs), cfg.total_timeout);
    cfg.fast_synth_timeout =
        std::min(secs_to_ms(fast_secs), cfg.template_synth_timeout);
    if (!internal_only) {
      std::string synth =
          synth_solver.empty() ? env_or_empty("SYNRG_SYNTH_SOLVER") : synth_solver;
      std::string smt =
          smt_solver.empty() ? env_or_empty("SYNRG_SMT_SOLVER") : smt_solver;
      if (!synth.empty())
        cfg.synth_solver = synrg::SolverSpec{
            synth, synrg::SolverKind::SynthesisSolver, cfg.template_synth_timeout};
      if (!smt.empty())
        cfg.smt_solver = synrg::SolverSpec{smt, synrg::SolverKind::SmtSolver,
                                           cfg.verify_timeout};
    }
    cfg.accept_unverified = accept_unverified;
    if (trace_generalization)
      cfg.generalization_trace = trace_sink;
    return cfg;
  }
};

int run_solve(const std::string &file, const CommonFlags &flags,
              const std::string &emit_bounded, bool fragment_report) {
  std::ifstream in(file);
  if (!in) {
    std::cerr << "error: cannot read " << file << "\n";
    return 4;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  synrg::Problem p;
  try {
    p = synrg::parse_problem(buf.str());
  } catch (const std::runtime_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  if (!emit_bounded.empty()) {
    try {
      synrg::BoundedProblem bp = synrg::restrict_spec(p, flags.bound_start);
      std::ofstream out(emit_bounded);
      if (!out) {
        std::cerr << "error: cannot write " << emit_bounded << "\n";
        return 4;
      }
      out << synrg::print_sygus(bp.as_problem(), false);
    } catch (const std::runtime_error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return 4;
    }
    return 0;
  }

  if (fragment_report) {
    synrg::FragmentReport fr =
        synrg::classify_array_property(synrg::mk_and(p.constraints));
    if (fr.in_fragment) {
      std::cout << "fragment: inside the array property fragment\n";
    } else {
      std::cout << "fragment: outside the array property fragment\n";
      for (const auto &[path, why] : fr.violations)
        std::cout << "  " << path << ": " << why << "\n";
    }
  }

  synrg::RunReport rep;
  try {
    rep = synrg::solve(p, flags.config(&std::cerr));
  } catch (const std::runtime_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }

  if (rep.solved) {
    for (const auto &f : p.synth_funs) {
      std::cout << "(define-fun " << f.name << " (";
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i)
          std::cout << " ";
        std::cout << "(" << f.params[i].first << " "
                  << synrg::print_sort(f.params[i].second) << ")";
      }
      std::cout << ") " << synrg::print_sort(f.return_sort) << " "
                << synrg::print_term(rep.bindings.at(f.name)) << ")\n";
    }
    if (!rep.verified)
      std::cerr << "warning: candidate was not verified\n";
  } else {
    std::cerr << "failed: " << synrg::to_string(rep.fail_reason) << "\n";
  }
  if (flags.json)
    std::cout << rep.to_json().dump(2) << "\n";
  if (rep.solved)
    return rep.verified ? 0 : 2;
  return 3;
}

int run_bench(const std::string &dir, const CommonFlags &flags, int jobs) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    std::cerr << "error: not a directory: " << dir << "\n";
    return 4;
  }
  synrg::BenchmarkReport report =
      synrg::run_benchmarks(dir, flags.config(&std::cerr), jobs);
  if (flags.json)
    std::cout << report.to_json().dump(2) << "\n";
  else
    std::cout << report.to_table();
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"synthesis of quantified array expressions by restriction "
               "and generalization"};
  app.require_subcommand(1);

  auto *solve_cmd = app.add_subcommand("solve", "solve one .sl problem");
  std::string file;
  solve_cmd->add_option("file", file, "SyGuS problem file")->required();
  CommonFlags solve_flags;
  solve_flags.attach(solve_cmd);
  std::string emit_bounded;
  solve_cmd->add_option("--emit-bounded", emit_bounded,
                        "write the bound-start restriction to PATH and exit");
  bool fragment_report = false;
  solve_cmd->add_flag("--fragment-report", fragment_report,
                      "print the array-property-fragment classification");

  auto *bench_cmd =
      app.add_subcommand("bench", "run every .sl file under a directory");
  std::string dir;
  bench_cmd->add_option("dir", dir, "benchmark directory")->required();
  CommonFlags bench_flags;
  bench_flags.attach(bench_cmd);
  int jobs = 1;
  bench_cmd->add_option("--jobs", jobs, "parallel workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 4;
  }

  if (solve_cmd->parsed())
    return run_solve(file, solve_flags, emit_bounded, fragment_report);
  return run_bench(dir, bench_flags, jobs);
}
