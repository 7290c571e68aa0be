// Synthesis and verification backends: external solver subprocesses speaking
// SyGuS-IF / SMT-LIB, and internal fallbacks (enumerative CEGIS synthesis,
// bounded finite-model verification).
#ifndef SYNRG_SOLVERS_H
#define SYNRG_SOLVERS_H

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "synrg/eval.h"
#include "synrg/problem.h"
#include "synrg/sygus_io.h"

namespace synrg {

enum class SolverKind { SynthesisSolver, SmtSolver };

// An external backend, invoked as `<command...> <tempfile>` with the query
// written to the temp file and the reply read from stdout.
struct SolverSpec {
  std::string command; // executable plus leading arguments
  SolverKind kind = SolverKind::SynthesisSolver;
  std::chrono::milliseconds wall_timeout{30000};
};

// --- synthesis outcomes ---------------------------------------------------

struct SynthSolved {
  std::map<std::string, Expr> bindings; // synth-fun name -> body
};
struct SynthInfeasible {};
struct SynthTimedOut {};
struct SynthUnknown {
  std::string reason;
};
using SynthOutcome =
    std::variant<SynthSolved, SynthInfeasible, SynthTimedOut, SynthUnknown>;

inline const SynthSolved *solved(const SynthOutcome &o) {
  return std::get_if<SynthSolved>(&o);
}

// --- verification outcomes ------------------------------------------------

struct VerifyValid {
  std::string method; // "external" or "internal-bounded"
};
struct VerifyCounterExample {
  Model model;
};
struct VerifyUnknown {
  std::string reason;
};
struct VerifyTimedOut {};
using VerifyOutcome = std::variant<VerifyValid, VerifyCounterExample,
                                   VerifyUnknown, VerifyTimedOut>;

// --- internal backends ----------------------------------------------------

struct EnumLimits {
  int max_size = 16;            // number of production applications
  long max_candidates = 500000; // start-symbol candidates tested per round
  std::chrono::milliseconds timeout{60000};
  // finite-model parameters for counterexample search
  std::int64_t array_len = 2;
  std::int64_t value_min = -3;
  std::int64_t value_max = 3;
};

struct InternalSynth {
  EnumLimits limits;
};
struct InternalVerify {
  FiniteCheckConfig config;
};

using SynthBackend = std::variant<SolverSpec, InternalSynth>;
using VerifyBackend = std::variant<SolverSpec, InternalVerify>;

// --- operations -----------------------------------------------------------

// Solves the (bounded, quantifier-free) problem.  `grammars` maps synth-fun
// names to the grammar to attach; an absent entry means no syntactic
// template (phase one).  The internal backend derives a default template in
// that case.  External Solved answers are re-checked by finite evaluation
// before being returned; answers that fail the check degrade to Unknown.
// Throws BackendUnavailable when the external process cannot be spawned or
// exits nonzero with no output.
SynthOutcome synthesize(const Problem &bounded,
                        const std::map<std::string, Grammar> &grammars,
                        std::chrono::milliseconds timeout,
                        const SynthBackend &backend);

// Inlines `bindings` into every constraint, builds the negated conjunction,
// and checks it: externally via an SMT query (unsat -> Valid), or internally
// by bounded finite-model search (unsat within the window -> Valid with
// method "internal-bounded").  Counterexample models are validated by
// evaluation before being reported; invalid models degrade to Unknown.
VerifyOutcome verify(const Problem &p,
                     const std::map<std::string, Expr> &bindings,
                     const VerifyBackend &backend);

// Every constraint with the synthesized bodies substituted for their
// applications (capture-avoiding beta reduction).
Expr inline_bindings(const Expr &e, const Problem &p,
                     const std::map<std::string, Expr> &bindings);

// --- subprocess runner ----------------------------------------------------

struct RunResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string output; // captured stdout
};

// Runs `command... file` with stdout captured; on deadline the whole process
// group is killed.  Never leaves zombies behind.
RunResult run_solver_process(const std::string &command,
                             const std::string &file,
                             std::chrono::milliseconds timeout);

} // namespace synrg

#endif
