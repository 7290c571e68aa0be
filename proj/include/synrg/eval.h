// Finite-model evaluation of expressions and a brute-force satisfiability
// oracle.  A finite model fixes an array length L: arrays carry explicit
// entries for indices [0, L), reads elsewhere yield the default element 0,
// and quantified variables range over [0, L).
#ifndef SYNRG_EVAL_H
#define SYNRG_EVAL_H

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "synrg/problem.h"
#include "synrg/sygus_io.h"

namespace synrg {

struct ArrayValue {
  std::map<std::int64_t, std::int64_t> entries;
  std::int64_t def = 0;

  std::int64_t get(std::int64_t i) const {
    auto it = entries.find(i);
    return it == entries.end() ? def : it->second;
  }
  bool operator==(const ArrayValue &) const = default;
};

using Value = std::variant<std::int64_t, bool, ArrayValue>;

using Valuation = std::map<std::string, Value>;

// Bodies available for applications of synthesized functions during
// evaluation (beta-reduced on the fly).
struct FunDef {
  std::vector<std::pair<std::string, Sort>> params;
  Expr body;
};
using Bindings = std::map<std::string, FunDef>;

struct EvalContext {
  std::int64_t array_len = 2; // quantifier range is [0, array_len)
  const Bindings *bindings = nullptr;
};

// Throws EvalError for unbound symbols or unbound synthesized functions.
Value evaluate(const Expr &e, const Valuation &val, const EvalContext &ctx);
bool evaluate_bool(const Expr &e, const Valuation &val,
                   const EvalContext &ctx);

// Result of the brute-force search: a satisfying valuation, or none within
// the searched window.
struct FiniteCheckResult {
  std::optional<Valuation> witness;
  std::uint64_t valuations_tried = 0;
  bool sat() const { return witness.has_value(); }
};

struct FiniteCheckConfig {
  std::int64_t array_len = 2;
  std::int64_t value_min = -3;
  std::int64_t value_max = 3;
  std::uint64_t max_valuations = 5'000'000;
  const Bindings *bindings = nullptr;
};

// Exhaustively searches valuations of e's free variables: integers over
// [value_min, value_max], booleans over both values, arrays over all entry
// vectors of length array_len with values in the window.  Applications of
// unbound synthesized functions are treated as opaque atoms: distinct
// argument values get independently enumerated outputs.  Throws
// OracleTooLarge when the search space exceeds max_valuations.
FiniteCheckResult finite_check(const Expr &e, const FiniteCheckConfig &cfg);

// True when a and b evaluate identically on every valuation in the window.
bool equivalent_on_window(const Expr &a, const Expr &b,
                          const FiniteCheckConfig &cfg);

// Largest integer constant used as an array read/write index anywhere in e,
// or nullopt when there is none.  Used to size finite models so that
// constant reads beyond a bound are still honest array elements.
std::optional<std::int64_t> max_constant_index(const Expr &e);

// Converts a solver model into an evaluator valuation.
Valuation valuation_from_model(const Model &m);

} // namespace synrg

#endif
