#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synrg/restriction.h"
#include "synrg/eval.h"
#include "synrg/sygus_io.h"
#include "testutil.h"

using namespace synrg;
namespace tu = synrg::testutil;

namespace {

Expr ivar(const std::string &n) { return mk_var(n, Sort::Int); }
Expr avar(const std::string &n) { return mk_var(n, Sort::IntArray); }

Expr range_guard(const Expr &t, int b) {
  return mk_apply(Op::And, {mk_apply(Op::Le, {mk_int(0), t}),
                            mk_apply(Op::Lt, {t, mk_int(b)})});
}

} // namespace

TEST_CASE("universal bodies with quantified reads get an implication guard") {
  Expr e = mk_forall({{"i", Sort::Int}},
                     mk_apply(Op::Ge, {mk_select(avar("A"), ivar("i")),
                                       mk_int(0)}));
  BoundResult r = bound_quantification(e, 2);
  Expr expected =
      mk_forall({{"i", Sort::Int}},
                mk_implies(range_guard(ivar("i"), 2),
                           mk_apply(Op::Ge, {mk_select(avar("A"), ivar("i")),
                                             mk_int(0)})));
  CHECK(r.expr == expected);
  CHECK(r.free_index_terms.empty());
}

TEST_CASE("existential bodies are guarded by conjunction") {
  Expr e = mk_exists({{"i", Sort::Int}},
                     mk_apply(Op::Lt, {mk_select(avar("A"), ivar("i")),
                                       mk_int(0)}));
  BoundResult r = bound_quantification(e, 2);
  REQUIRE(r.expr.kind() == Kind::Quant);
  const Expr &body = r.expr.body();
  REQUIRE(body.kind() == Kind::Apply);
  CHECK(body.op() == Op::And);
  CHECK(body.args()[0] == range_guard(ivar("i"), 2));
}

TEST_CASE("array-free expressions pass through unchanged") {
  Expr e = mk_apply(Op::Gt, {ivar("c"), mk_int(0)});
  BoundResult r = bound_quantification(e, 2);
  CHECK(r.expr == e);
  CHECK(r.free_index_terms.empty());
}

TEST_CASE("free index terms are recorded for top-level guarding") {
  Expr e = mk_apply(Op::Eq, {mk_select(avar("A"), ivar("x")),
                             mk_select(avar("B"), ivar("y"))});
  BoundResult r = bound_quantification(e, 2);
  CHECK(r.expr == e);
  REQUIRE(r.free_index_terms.size() == 2);
  CHECK(r.free_index_terms[0] == ivar("x"));
  CHECK(r.free_index_terms[1] == ivar("y"));
}

TEST_CASE("compound free index terms are guarded whole") {
  Expr idx = mk_apply(Op::Add, {ivar("x"), mk_int(1)});
  Expr e = mk_apply(Op::Ge, {mk_select(avar("A"), idx), mk_int(0)});
  BoundResult r = bound_quantification(e, 2);
  REQUIRE(r.free_index_terms.size() == 1);
  CHECK(r.free_index_terms[0] == idx);

  // the whole term appears in the restricted constraint's guard
  Expr restricted = restrict_constraint(e, 2);
  CHECK(!tu::contains_quant(restricted));
  REQUIRE(restricted.kind() == Kind::Apply);
  CHECK(restricted.op() == Op::Implies);
  CHECK(restricted.args()[0] == range_guard(idx, 2));
}

TEST_CASE("quantifier expansion produces finite conjunctions/disjunctions") {
  Expr sel = mk_select(avar("A"), ivar("i"));
  Expr all = mk_forall({{"i", Sort::Int}},
                       mk_implies(range_guard(ivar("i"), 2),
                                  mk_apply(Op::Ge, {sel, mk_int(0)})));
  Expr expanded = remove_quantifiers(all, 2);
  Expr a0 = mk_apply(Op::Ge, {mk_select(avar("A"), mk_int(0)), mk_int(0)});
  Expr a1 = mk_apply(Op::Ge, {mk_select(avar("A"), mk_int(1)), mk_int(0)});
  CHECK(expanded == mk_and({a0, a1}));

  Expr some = mk_exists({{"i", Sort::Int}},
                        mk_apply(Op::And,
                                 {range_guard(ivar("i"), 2),
                                  mk_apply(Op::Lt, {sel, mk_int(0)})}));
  Expr dis = remove_quantifiers(some, 2);
  Expr l0 = mk_apply(Op::Lt, {mk_select(avar("A"), mk_int(0)), mk_int(0)});
  Expr l1 = mk_apply(Op::Lt, {mk_select(avar("A"), mk_int(1)), mk_int(0)});
  CHECK(dis == mk_or({l0, l1}));
}

TEST_CASE("empty expansion ranges collapse to the connective's unit") {
  Expr body = mk_apply(Op::Ge, {mk_select(avar("A"), ivar("i")), mk_int(0)});
  CHECK(remove_quantifiers(mk_forall({{"i", Sort::Int}}, body), 0) ==
        mk_bool(true));
  CHECK(remove_quantifiers(mk_exists({{"i", Sort::Int}}, body), 0) ==
        mk_bool(false));
}

TEST_CASE("multi-variable binders expand over all combinations") {
  Expr body = mk_apply(Op::Le, {mk_select(avar("A"), ivar("i")),
                                mk_select(avar("A"), ivar("j"))});
  Expr e = mk_forall({{"i", Sort::Int}, {"j", Sort::Int}}, body);
  Expr restricted = restrict_constraint(e, 2);
  CHECK(!tu::contains_quant(restricted));
  // pointwise agreement with the quantified original on length-2 models
  CHECK(tu::equiv_window(e, restricted, 2, -1, 1));
  // all four instantiations are present (two fold away as A[k] <= A[k])
  auto conjuncts = tu::conjuncts_of(simplify(restricted));
  CHECK(conjuncts.size() == 2);
}

TEST_CASE("existential membership expands to a disjunction over the prefix") {
  Expr e = mk_exists({{"i", Sort::Int}},
                     mk_apply(Op::Eq, {mk_select(avar("A"), ivar("i")),
                                       mk_int(5)}));
  Expr restricted = restrict_constraint(e, 2);
  Expr e0 = mk_apply(Op::Eq, {mk_select(avar("A"), mk_int(0)), mk_int(5)});
  Expr e1 = mk_apply(Op::Eq, {mk_select(avar("A"), mk_int(1)), mk_int(5)});
  CHECK(restricted == mk_or({e0, e1}));
  // cross-check: same truth value on every length-2 model with values
  // covering the compared constant
  CHECK(tu::equiv_window(e, restricted, 2, -1, 5));
}

TEST_CASE("restrict_spec produces quantifier-free bounded problems") {
  for (const auto &f : tu::corpus_files()) {
    CAPTURE(f.string());
    Problem p = parse_problem(tu::read_file(f));
    for (int b : {2, 3}) {
      BoundedProblem bp = restrict_spec(p, b);
      CHECK(bp.bound == b);
      CHECK(bp.constraints.size() == p.constraints.size());
      for (const Expr &c : bp.constraints)
        CHECK(!tu::contains_quant(c));
      // as_problem carries the declarations over
      Problem qf = bp.as_problem();
      CHECK(qf.declared_vars == p.declared_vars);
      CHECK(qf.constraints.size() == bp.constraints.size());
    }
  }
}

TEST_CASE("restriction is deterministic text-for-text") {
  tu::ConstraintGen gen(29, 2);
  for (int k = 0; k < 40; ++k) {
    Expr e = gen.constraint(3);
    Expr r1 = restrict_constraint(e, 2);
    Expr r2 = restrict_constraint(e, 2);
    CHECK(print_term(r1) == print_term(r2));
    CHECK(r1 == r2);
  }
}

TEST_CASE("bounded-model agreement for random quantified constraints") {
  // On models whose arrays have exactly the bounded length and whose index
  // terms all fall inside [0, b), the original and restricted constraint
  // evaluate identically.  The generator only emits in-range indices.
  int checked = 0;
  for (int b : {2, 3}) {
    tu::ConstraintGen gen(100 + b, b);
    for (int k = 0; k < 100; ++k) {
      Expr e = gen.constraint(4);
      Expr restricted = restrict_constraint(e, b);
      CHECK(!tu::contains_quant(restricted));
      CAPTURE(print_term(e));
      CHECK(tu::equiv_window(e, restricted, b, -1, 1));
      ++checked;
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("quantifier-freeness holds for arbitrary guarded expansions") {
  for (int b : {1, 2, 3}) {
    tu::ConstraintGen gen(200 + b, b);
    for (int k = 0; k < 40; ++k) {
      Expr e = gen.constraint(4);
      Expr guarded = bound_quantification(e, b).expr;
      CHECK(!tu::contains_quant(remove_quantifiers(guarded, b)));
    }
  }
}
