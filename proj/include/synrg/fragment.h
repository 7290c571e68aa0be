// Syntactic classification against the decidable array property fragment:
// universally quantified blocks must have the shape  forall i...  guard => value
// where the guard compares index terms and the quantified variables are used
// only as whole array read indices.  Also: skolemization of top-level
// existentials, computation of the instantiation index set, and expansion of
// universals over that set.
#ifndef SYNRG_FRAGMENT_H
#define SYNRG_FRAGMENT_H

#include <string>
#include <utility>
#include <vector>

#include "synrg/problem.h"

namespace synrg {

struct FragmentReport {
  bool in_fragment = true;
  // (location path, reason) for every rule violation found
  std::vector<std::pair<std::string, std::string>> violations;
  // guard and value part of the first universal block, when present
  std::optional<Expr> index_guard;
  std::optional<Expr> value_constraint;
};

struct IndexSet {
  std::vector<Expr> terms; // deduplicated, in first-occurrence order

  bool contains(const Expr &t) const {
    for (const auto &u : terms)
      if (u == t)
        return true;
    return false;
  }
  std::size_t size() const { return terms.size(); }
};

// Pure syntax; never invokes a solver.
FragmentReport classify_array_property(const Expr &e);

// All array index terms free of quantified variables, plus the non-quantified
// comparison sides of universal index guards.
IndexSet index_terms(const Expr &e);

struct SkolemResult {
  Expr expr;
  std::vector<std::pair<std::string, Sort>> introduced;
};

// Replaces top-level (positive, not under a universal) existentials with
// fresh variables drawn from gen.  Throws NotSkolemizableError when an
// existential sits under a universal or under a negative position.
SkolemResult skolemize(const Expr &e, FreshVarGen &gen);
SkolemResult skolemize(const Expr &e);

// Replaces every universal block by the conjunction of its instantiations
// over r.  Throws EmptyIndexSetError when r is empty.
Expr instantiate_universals(const Expr &e, const IndexSet &r);

} // namespace synrg

#endif
