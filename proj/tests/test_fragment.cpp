#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synrg/fragment.h"
#include "synrg/eval.h"
#include "synrg/sygus_io.h"
#include "testutil.h"

#include <random>

using namespace synrg;
namespace tu = synrg::testutil;

namespace {

Expr ivar(const std::string &n) { return mk_var(n, Sort::Int); }
Expr avar(const std::string &n) { return mk_var(n, Sort::IntArray); }

// The worked verification condition for one step of an array-initialisation
// loop: everything below i is already zero, position i is set now, the rest
// is framed, and the negated postcondition claims a nonzero cell at or below
// i in the new array.
Expr init_step_formula() {
  Expr a = avar("a"), a2 = avar("a2"), i = ivar("i"), x = ivar("x");
  Expr below_zero = mk_forall(
      {{"x", Sort::Int}},
      mk_implies(mk_apply(Op::Lt, {x, i}),
                 mk_apply(Op::Eq, {mk_select(a, x), mk_int(0)})));
  Expr set_now = mk_apply(Op::Eq, {mk_select(a2, i), mk_int(0)});
  Expr frame = mk_forall(
      {{"x", Sort::Int}},
      mk_implies(mk_apply(Op::Neq, {x, i}),
                 mk_apply(Op::Eq, {mk_select(a2, x), mk_select(a, x)})));
  Expr bad_cell = mk_exists(
      {{"x", Sort::Int}},
      mk_apply(Op::And, {mk_apply(Op::Le, {x, i}),
                         mk_apply(Op::Neq, {mk_select(a2, x), mk_int(0)})}));
  return mk_and({below_zero, set_now, frame, bad_cell});
}

bool is_sat(const Expr &e, std::int64_t len) {
  FiniteCheckConfig cfg;
  cfg.array_len = len;
  cfg.value_min = -1;
  cfg.value_max = 1;
  return finite_check(e, cfg).sat();
}

} // namespace

TEST_CASE("guarded universal array properties are inside the fragment") {
  Expr e = mk_forall({{"x", Sort::Int}},
                     mk_implies(mk_apply(Op::Lt, {ivar("x"), ivar("i")}),
                                mk_apply(Op::Eq, {mk_select(avar("a"),
                                                            ivar("x")),
                                                  mk_int(0)})));
  FragmentReport r = classify_array_property(e);
  CHECK(r.in_fragment);
  CHECK(r.violations.empty());
  REQUIRE(r.index_guard.has_value());
  CHECK(*r.index_guard == mk_apply(Op::Lt, {ivar("x"), ivar("i")}));
  REQUIRE(r.value_constraint.has_value());
  CHECK(*r.value_constraint ==
        mk_apply(Op::Eq, {mk_select(avar("a"), ivar("x")), mk_int(0)}));
}

TEST_CASE("quantifier alternation under a universal leaves the fragment") {
  Expr e = mk_forall(
      {{"i", Sort::Int}},
      mk_exists({{"j", Sort::Int}},
                mk_apply(Op::Eq, {mk_select(avar("A"), ivar("i")),
                                  mk_select(avar("B"), ivar("j"))})));
  FragmentReport r = classify_array_property(e);
  CHECK(!r.in_fragment);
  CHECK(!r.violations.empty());
}

TEST_CASE("arithmetic on a quantified index leaves the fragment") {
  Expr e = mk_forall(
      {{"x", Sort::Int}},
      mk_apply(Op::Eq, {mk_select(avar("a"),
                                  mk_apply(Op::Add, {ivar("x"), mk_int(1)})),
                        mk_int(0)}));
  FragmentReport r = classify_array_property(e);
  CHECK(!r.in_fragment);
  CHECK(!r.violations.empty());
}

TEST_CASE("membership flag always matches the violation list") {
  tu::ConstraintGen gen(31, 2);
  for (int k = 0; k < 80; ++k) {
    FragmentReport r = classify_array_property(gen.constraint(3));
    CHECK(r.in_fragment == r.violations.empty());
  }
}

TEST_CASE("skolemization replaces top-level existentials by fresh constants") {
  Expr a2 = avar("a2"), i = ivar("i"), x = ivar("x");
  Expr e = mk_exists(
      {{"x", Sort::Int}},
      mk_apply(Op::And, {mk_apply(Op::Le, {x, i}),
                         mk_apply(Op::Neq, {mk_select(a2, x), mk_int(0)})}));
  SkolemResult r = skolemize(e);
  REQUIRE(r.introduced.size() == 1);
  CHECK(r.introduced[0].second == Sort::Int);
  Expr z = mk_var(r.introduced[0].first, Sort::Int);
  CHECK(r.expr ==
        mk_apply(Op::And, {mk_apply(Op::Le, {z, i}),
                           mk_apply(Op::Neq, {mk_select(a2, z), mk_int(0)})}));
}

TEST_CASE("quantifier-free inputs skolemize to themselves") {
  Expr e = mk_apply(Op::Gt, {ivar("c"), mk_int(0)});
  SkolemResult r = skolemize(e);
  CHECK(r.expr == e);
  CHECK(r.introduced.empty());
}

TEST_CASE("existentials under a universal or a negation are rejected") {
  Expr inner = mk_apply(Op::Eq, {mk_select(avar("A"), ivar("j")), mk_int(0)});
  Expr under_forall =
      mk_forall({{"i", Sort::Int}}, mk_exists({{"j", Sort::Int}}, inner));
  CHECK_THROWS_AS(skolemize(under_forall), NotSkolemizableError);

  Expr negated = mk_not(mk_exists({{"j", Sort::Int}}, inner));
  CHECK_THROWS_AS(skolemize(negated), NotSkolemizableError);
}

TEST_CASE("index terms collect reads and guard sides outside the binders") {
  Expr formula = init_step_formula();
  SkolemResult sk = skolemize(formula);
  IndexSet r = index_terms(sk.expr);
  REQUIRE(r.size() == 2);
  CHECK(r.contains(ivar("i")));
  CHECK(r.contains(mk_var(sk.introduced[0].first, Sort::Int)));
}

TEST_CASE("index terms of array-free and guard-heavy formulas") {
  CHECK(index_terms(mk_apply(Op::Gt, {ivar("c"), mk_int(0)})).size() == 0);

  Expr k = ivar("k");
  Expr kp1 = mk_apply(Op::Add, {k, mk_int(1)});
  Expr e = mk_apply(
      Op::And,
      {mk_apply(Op::Eq, {mk_select(avar("A"), k), mk_int(0)}),
       mk_forall({{"x", Sort::Int}},
                 mk_implies(mk_apply(Op::Le, {ivar("x"), kp1}),
                            mk_apply(Op::Ge, {mk_select(avar("A"), ivar("x")),
                                              mk_int(0)})))});
  IndexSet r = index_terms(e);
  REQUIRE(r.size() == 2);
  CHECK(r.contains(k));
  CHECK(r.contains(kp1));
}

TEST_CASE("universal instantiation expands over the index set") {
  Expr e = mk_forall({{"x", Sort::Int}},
                     mk_apply(Op::Ge, {mk_select(avar("A"), ivar("x")),
                                       mk_int(0)}));
  IndexSet r;
  r.terms = {ivar("k")};
  CHECK(instantiate_universals(e, r) ==
        mk_apply(Op::Ge, {mk_select(avar("A"), ivar("k")), mk_int(0)}));

  IndexSet empty;
  CHECK_THROWS_AS(instantiate_universals(e, empty), EmptyIndexSetError);
}

TEST_CASE("the worked loop-step formula instantiates to its displayed form") {
  Expr formula = init_step_formula();
  SkolemResult sk = skolemize(formula);
  IndexSet r = index_terms(sk.expr);
  Expr inst = simplify(instantiate_universals(sk.expr, r));
  CHECK(!tu::contains_quant(inst));

  Expr a = avar("a"), a2 = avar("a2"), i = ivar("i");
  Expr z = mk_var(sk.introduced[0].first, Sort::Int);
  std::vector<Expr> expected = {
      mk_implies(mk_apply(Op::Lt, {z, i}),
                 mk_apply(Op::Eq, {mk_select(a, z), mk_int(0)})),
      mk_apply(Op::Eq, {mk_select(a2, i), mk_int(0)}),
      mk_implies(mk_apply(Op::Neq, {z, i}),
                 mk_apply(Op::Eq, {mk_select(a2, z), mk_select(a, z)})),
      mk_apply(Op::And,
               {mk_apply(Op::Le, {z, i}),
                mk_apply(Op::Neq, {mk_select(a2, z), mk_int(0)})})};
  // the self-instantiations (i < i, i != i) fold away; what remains is
  // exactly the four displayed conjuncts
  CHECK(tu::same_conjunct_set(tu::conjuncts_of(inst),
                              tu::conjuncts_of(simplify(mk_and(expected)))));

  // the formula is a contradiction: the loop step cannot leave a nonzero
  // cell behind, and neither can its instantiation
  CHECK(!is_sat(formula, 3));
  CHECK(!is_sat(inst, 3));
}

TEST_CASE("instantiation preserves satisfiability for fragment formulas") {
  // Random in-fragment formulas: a guarded universal plus quantifier-free
  // side constraints, sometimes under a top-level existential.
  std::mt19937 rng(37);
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  int agreements = 0;
  for (int k = 0; k < 100; ++k) {
    Expr A = avar("A");
    Expr bound = pick(0, 1) ? ivar("k") : mk_int(pick(0, 2));
    Op guard_cmp[] = {Op::Le, Op::Lt, Op::Eq};
    Op value_cmp[] = {Op::Ge, Op::Le, Op::Eq, Op::Neq};
    Expr x = ivar("x");
    Expr universal = mk_forall(
        {{"x", Sort::Int}},
        mk_implies(mk_apply(guard_cmp[pick(0, 2)], {x, bound}),
                   mk_apply(value_cmp[pick(0, 3)],
                            {mk_select(A, x), mk_int(pick(-1, 1))})));
    std::vector<Expr> side;
    // keep the free index inside the evaluated prefix so the finite
    // semantics of the universal covers every materialized instance
    side.push_back(mk_apply(Op::And,
                            {mk_apply(Op::Le, {mk_int(0), ivar("k")}),
                             mk_apply(Op::Lt, {ivar("k"), mk_int(3)})}));
    int nside = pick(0, 2);
    for (int s = 0; s < nside; ++s)
      side.push_back(mk_apply(value_cmp[pick(0, 3)],
                              {mk_select(A, pick(0, 1) ? ivar("k")
                                                       : mk_int(pick(0, 2))),
                               mk_int(pick(-1, 1))}));
    side.push_back(universal);
    Expr e = mk_and(std::move(side));
    if (pick(0, 3) == 0) {
      // close over k existentially; skolemization reopens it
      e = mk_exists({{"q", Sort::Int}}, substitute(e, "k", ivar("q")));
    }

    REQUIRE(classify_array_property(e).in_fragment);
    SkolemResult sk = skolemize(e);
    IndexSet r = index_terms(sk.expr);
    if (r.terms.empty())
      r.terms.push_back(mk_int(0)); // no free index term: any witness works
    Expr inst = instantiate_universals(sk.expr, r);
    CHECK(!tu::contains_quant(inst));
    CHECK(is_sat(e, 3) == is_sat(inst, 3));
    ++agreements;
  }
  CHECK(agreements == 100);
}
