// Pipeline orchestration: restrict, synthesize (fast, then templated),
// generalize syntactically, verify, fall back to synthesis-based
// generalization, and raise the bound until solved or out of budget.
#ifndef SYNRG_DRIVER_H
#define SYNRG_DRIVER_H

#include <chrono>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "synrg/fragment.h"
#include "synrg/restriction.h"
#include "synrg/solvers.h"

namespace synrg {

struct PipelineConfig {
  BoundConfig bound;
  std::chrono::milliseconds fast_synth_timeout{2000};
  std::chrono::milliseconds template_synth_timeout{60000};
  std::chrono::milliseconds verify_timeout{30000};
  std::chrono::milliseconds total_timeout{300000};
  std::optional<SolverSpec> synth_solver;
  std::optional<SolverSpec> smt_solver;
  bool use_internal_fallback = true;
  bool accept_unverified = false;
  // internal enumerator budget
  int max_term_size = 16;
  long max_candidates = 500000;
  // finite-model window for internal synthesis/verification
  std::int64_t value_min = -3;
  std::int64_t value_max = 3;
  std::ostream *generalization_trace = nullptr;
};

struct PhaseRecord {
  int bound = 0;
  std::string phase;   // restrict | synth-fast | synth-template |
                       // generalize | verify | synth-generalization | ...
  std::string outcome; // solved / infeasible / valid / counterexample / ...
  long long millis = 0;
  std::optional<Expr> candidate;
  std::string detail;
};

enum class FailReason { BoundExhausted, TotalTimeout, BackendUnavailable };

std::string to_string(FailReason r);

struct RunReport {
  bool solved = false;
  bool verified = false;
  std::string solved_phase; // "syntactic" or "synthesis-based"
  std::map<std::string, Expr> bindings;
  FailReason fail_reason = FailReason::BoundExhausted;
  int final_bound = 0;
  long long wall_millis = 0;
  std::vector<PhaseRecord> records;
  FragmentReport fragment;

  nlohmann::json to_json() const;
};

RunReport solve(const Problem &p, const PipelineConfig &cfg);

// --- benchmark harness ----------------------------------------------------

struct BenchmarkRow {
  std::string file;
  std::string outcome; // solved / bound-exhausted / total-timeout /
                       // backend-unavailable / parse-error
  std::string phase;   // generalization phase that succeeded, if any
  bool verified = false;
  int final_bound = 0;
  long long millis = 0;
  std::string detail;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

// Runs solve on every .sl file under dir (recursively), jobs files at a
// time.  Unreadable or malformed files become parse-error rows.
BenchmarkReport run_benchmarks(const std::string &dir,
                               const PipelineConfig &cfg, int jobs = 1);

} // namespace synrg

#endif
