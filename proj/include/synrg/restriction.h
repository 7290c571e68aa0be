// Restriction of a quantified synthesis specification to a quantifier-free
// one over a finite array prefix of length b: quantified array reads are
// guarded to [0, b), free index terms are guarded at the top of each
// constraint, and quantifiers are expanded into finite conjunctions or
// disjunctions over {0, ..., b-1}.
#ifndef SYNRG_RESTRICTION_H
#define SYNRG_RESTRICTION_H

#include "synrg/problem.h"

namespace synrg {

struct BoundConfig {
  int b_start = 2;
  int b_max = 8;
  int step = 1;
};

struct BoundedProblem {
  Problem base;                  // the original, quantified problem
  int bound = 2;                 // the b this restriction was taken at
  std::vector<Expr> constraints; // quantifier-free

  // The bounded problem as a printable Problem (same declarations, bounded
  // constraints).
  Problem as_problem() const {
    Problem p = base;
    p.constraints = constraints;
    return p;
  }
};

struct BoundResult {
  Expr expr;
  // Array index terms with no quantified variables, in first-occurrence
  // order; the caller guards these at the top level of the constraint.
  std::vector<Expr> free_index_terms;
};

// Guards array accesses in e for the bounded domain: each quantifier whose
// scope reads an array at one of its variables has its body guarded with
// 0 <= v && v < b (as an implication under forall, a conjunction under
// exists); index terms built only from free variables and constants are
// returned for top-level guarding.  Multi-variable binders are split into
// nested single-variable quantifiers first.
BoundResult bound_quantification(const Expr &e, int b);

// Replaces every quantifier by an explicit finite expansion over
// {0, ..., b-1}: conjunction for forall, disjunction for exists.  With b = 0
// a forall becomes true and an exists becomes false.
Expr remove_quantifiers(const Expr &e, int b);

// Full restriction of one constraint: guard, expand, simplify.
Expr restrict_constraint(const Expr &c, int b);

// Restriction of a whole problem.  Throws SortError/UnsupportedError on
// malformed input; the bound must be positive.
BoundedProblem restrict_spec(const Problem &p, int b);

} // namespace synrg

#endif
