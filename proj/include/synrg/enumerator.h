// Internal enumerative CEGIS synthesizer: generates grammar terms in
// nondecreasing size, deduplicates by observational equivalence on the
// current counterexample inputs, and checks surviving candidates against the
// constraints by bounded finite-model search.
#ifndef SYNRG_ENUMERATOR_H
#define SYNRG_ENUMERATOR_H

#include "synrg/solvers.h"

namespace synrg {

// `grammars` must hold one grammar per synth-fun of p.  Deterministic given
// the limits; monotone in them (enlarging limits never turns Solved into
// Infeasible).  Infeasibility is only reported from sound probes: a
// synth-free constraint falsified by a concrete valuation, conflicting
// pinned values of the same application, or a valuation under which no
// assignment to the boolean applications satisfies the constraints.
SynthOutcome enumerate_candidates(const Problem &p,
                                  const std::map<std::string, Grammar> &grammars,
                                  const EnumLimits &limits);

} // namespace synrg

#endif
