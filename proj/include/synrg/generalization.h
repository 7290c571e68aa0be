// Reintroduction of quantifiers into bounded quantifier-free candidates, and
// grammar construction for the two synthesis phases.
//
// Two predicates "match" when replacing integer constants by a shared offset
// variable z makes them structurally equal: read indices become z+e_k,
// constants outside reads become z+f_k.  A matching set of conjuncts whose
// base indices cover the whole bounded range collapses to a single universal
// (dually, disjuncts to an existential).
#ifndef SYNRG_GENERALIZATION_H
#define SYNRG_GENERALIZATION_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "synrg/problem.h"

namespace synrg {

struct MatchWitness {
  // placeholder variable standing for the shared offset z
  std::string fresh_var;
  // (array symbol, offset e_k) for each abstracted read index
  std::vector<std::pair<std::string, std::int64_t>> read_offsets;
  // offsets f_k for abstracted constants outside array reads
  std::vector<std::int64_t> const_offsets;
  // the constants that mapped to z+0, one per matched predicate
  std::set<std::int64_t> base_indices;
  // first predicate rewritten over fresh_var; substituting a base index back
  // in reproduces the corresponding predicate
  Expr generalized;

  std::int64_t max_read_offset() const {
    std::int64_t m = 0;
    for (const auto &[arr, e] : read_offsets)
      m = std::max(m, e);
    return m;
  }
};

// Structural equality up to renaming of bound variables.
bool alpha_equivalent(const Expr &a, const Expr &b);

// Finds a shared-offset witness for two quantifier-free (or structurally
// alpha-matching quantified) predicates.  At least one abstracted position
// must be an array read index; differing constants must all differ by the
// same amount.  Absence of a witness is a value, never an error.
std::optional<MatchWitness> matching(const Expr &phi1, const Expr &phi2);

// Bottom-up over e: at every conjunction/disjunction, partitions operands
// into matching sets (first-fit in operand order); each set whose base
// indices cover the bounded range collapses to an unguarded quantifier over
// a fresh variable; everything else is kept verbatim.  Fresh variables are
// numbered in discovery order starting at z1.
Expr syntactic_generalize(const Expr &e, int b);
Expr syntactic_generalize(const Expr &e, int b, FreshVarGen &gen,
                          std::ostream *trace);

// Phase-two template grammar: Bool nonterminal with and/or/not and the
// comparisons >=, <=, =; Int nonterminal with 0, 1, the non-array
// parameters, -, +, and a read production arr[k] for every array parameter
// and every 0 <= k < b.  Throws UnsupportedError for array-sorted returns.
Grammar build_template_grammar(const SynthFun &f, int b);

// Grammar seeded with the predicates of a failed generalized candidate: the
// standard boolean skeleton, every maximal quantified-or-atomic predicate of
// the candidate verbatim, and a range-restricted variant of each quantified
// predicate with synthesizable bounds.
Grammar build_generalization_grammar(const Expr &candidate, const SynthFun &f);

} // namespace synrg

#endif
