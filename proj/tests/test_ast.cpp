#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synrg/ast.h"
#include "synrg/eval.h"
#include "testutil.h"

#include <vector>

using namespace synrg;
namespace tu = synrg::testutil;

namespace {

Expr ivar(const std::string &n) { return mk_var(n, Sort::Int); }
Expr avar(const std::string &n) { return mk_var(n, Sort::IntArray); }

Expr ge0(const Expr &t) { return mk_apply(Op::Ge, {t, mk_int(0)}); }

} // namespace

TEST_CASE("free_variables excludes binders and collects arrays") {
  Expr A = avar("A");
  Expr i = ivar("i");

  Expr all_nonneg = mk_forall({{"i", Sort::Int}}, ge0(mk_select(A, i)));
  auto fv = free_variables(all_nonneg);
  CHECK(fv.size() == 1);
  CHECK(fv.count("A") == 1);
  CHECK(fv.at("A") == Sort::IntArray);

  Expr pos = mk_apply(Op::Gt, {ivar("c"), mk_int(0)});
  fv = free_variables(pos);
  CHECK(fv.size() == 1);
  CHECK(fv.count("c") == 1);

  Expr body = mk_apply(Op::Eq, {mk_select(A, i),
                                mk_apply(Op::Add, {mk_select(avar("B"), i),
                                                   ivar("c")})});
  Expr shifted = mk_forall({{"i", Sort::Int}}, body);
  fv = free_variables(shifted);
  CHECK(fv.size() == 3);
  CHECK(fv.count("A") == 1);
  CHECK(fv.count("B") == 1);
  CHECK(fv.count("c") == 1);
}

TEST_CASE("substitute replaces free occurrences only") {
  Expr A = avar("A");
  Expr body = ge0(mk_select(A, ivar("i")));

  CHECK(substitute(body, "i", mk_int(0)) == ge0(mk_select(A, mk_int(0))));

  Expr quantified = mk_forall({{"i", Sort::Int}}, body);
  CHECK(substitute(quantified, "i", mk_int(1)) == quantified);

  Expr guarded = mk_implies(mk_apply(Op::Lt, {ivar("x"), ivar("i")}),
                            mk_apply(Op::Eq, {mk_select(avar("a"), ivar("x")),
                                              mk_int(0)}));
  Expr renamed = substitute(guarded, "x", ivar("z"));
  CHECK(renamed ==
        mk_implies(mk_apply(Op::Lt, {ivar("z"), ivar("i")}),
                   mk_apply(Op::Eq, {mk_select(avar("a"), ivar("z")),
                                     mk_int(0)})));
}

TEST_CASE("substitute avoids capture by renaming binders") {
  // forall q. A[q] >= x, substituting x := q + 1 must not capture q
  Expr e = mk_forall({{"q", Sort::Int}},
                     mk_apply(Op::Ge, {mk_select(avar("A"), ivar("q")),
                                       ivar("x")}));
  Expr t = mk_apply(Op::Add, {ivar("q"), mk_int(1)});
  Expr r = substitute(e, "x", t);

  REQUIRE(r.kind() == Kind::Quant);
  // the binder was renamed away from q
  CHECK(r.binders().front().first != "q");
  // q occurs free in the result (from the substituted term)
  auto fv = free_variables(r);
  CHECK(fv.count("q") == 1);
}

TEST_CASE("substitute rejects sort mismatches") {
  Expr e = ge0(ivar("x"));
  CHECK_THROWS_AS(substitute(e, "x", mk_bool(true)), SortError);
}

TEST_CASE("substituting a variable by itself is the identity") {
  tu::CandidateGen gen(7, 2);
  for (int k = 0; k < 50; ++k) {
    Expr e = gen.boolean(3);
    CHECK(substitute(e, "c", ivar("c")) == e);
  }
}

TEST_CASE("simplify folds constants and eliminates identities") {
  Expr A = avar("A");
  Expr guard = mk_apply(
      Op::And, {mk_apply(Op::Le, {mk_int(0), mk_int(1)}),
                mk_apply(Op::Lt, {mk_int(1), mk_int(2)})});
  Expr e = mk_implies(guard, ge0(mk_select(A, mk_int(1))));
  CHECK(simplify(e) == ge0(mk_select(A, mk_int(1))));

  CHECK(simplify(mk_apply(Op::Add, {ivar("x"), mk_int(0)})) == ivar("x"));

  Expr lt0 = mk_apply(Op::Lt, {mk_select(A, mk_int(0)), mk_int(0)});
  CHECK(simplify(mk_apply(Op::Or, {mk_bool(false), lt0})) == lt0);
}

TEST_CASE("simplify is idempotent") {
  tu::CandidateGen gen(11, 2);
  for (int k = 0; k < 100; ++k) {
    Expr e = gen.boolean(4);
    Expr s = simplify(e);
    CHECK(simplify(s) == s);
  }
}

TEST_CASE("simplify preserves meaning on finite models") {
  // integers in [-2, 2], arrays of length 2 and 3
  tu::CandidateGen gen(13, 3);
  for (int k = 0; k < 60; ++k) {
    Expr e = gen.boolean(3);
    CHECK(tu::equiv_window(e, simplify(e), 2, -2, 2));
  }
  tu::ConstraintGen qgen(17, 3);
  for (int k = 0; k < 15; ++k) {
    Expr e = qgen.constraint(3);
    CHECK(tu::equiv_window(e, simplify(e), 3, -2, 2));
  }
}

TEST_CASE("structural equality is an equivalence relation with stable hashes") {
  tu::CandidateGen g1(19, 2), g2(19, 2), g3(23, 2);
  for (int k = 0; k < 30; ++k) {
    Expr a = g1.boolean(3);
    Expr b = g2.boolean(3); // same seed stream: structurally equal, new nodes
    Expr c = g3.boolean(3);
    CHECK(a == a);
    CHECK(a == b);
    CHECK(b == a);
    CHECK(a.hash() == b.hash());
    if (a == c) {
      CHECK(c == b); // transitivity through a
    }
  }
}

TEST_CASE("boolean connective builders fold edge cases") {
  CHECK(mk_and({}) == mk_bool(true));
  CHECK(mk_or({}) == mk_bool(false));
  Expr p = ge0(ivar("x"));
  CHECK(mk_and({p}) == p);
  CHECK(mk_or({p}) == p);
  CHECK(mk_not(mk_not(p)) == p);
  CHECK(mk_not(mk_bool(true)) == mk_bool(false));
}

TEST_CASE("mk_apply enforces operator signatures") {
  Expr x = ivar("x");
  Expr y = ivar("y");
  // a product needs at least one constant operand
  CHECK_THROWS_AS(mk_apply(Op::MulConst, {x, y}), SortError);
  CHECK_NOTHROW(mk_apply(Op::MulConst, {mk_int(3), y}));
  // boolean connectives reject integer operands
  CHECK_THROWS_AS(mk_apply(Op::And, {x, mk_bool(true)}), SortError);
  // comparisons reject boolean operands
  CHECK_THROWS_AS(mk_apply(Op::Lt, {mk_bool(true), mk_bool(false)}),
                  SortError);
  // arity is checked
  CHECK_THROWS_AS(mk_apply(Op::Not, {mk_bool(true), mk_bool(false)}),
                  SortError);
}

TEST_CASE("select and quantifier constructors validate sorts") {
  CHECK_THROWS_AS(mk_select(ivar("x"), mk_int(0)), SortError);
  CHECK_THROWS_AS(mk_select(avar("A"), mk_bool(true)), SortError);
  CHECK_THROWS_AS(mk_quant(QuantKind::Forall, {{"b", Sort::Bool}},
                           mk_bool(true)),
                  SortError);
  CHECK_THROWS_AS(mk_quant(QuantKind::Forall, {}, mk_bool(true)), SortError);
  CHECK_THROWS_AS(mk_forall({{"i", Sort::Int}}, ivar("i")), SortError);
}

TEST_CASE("fresh variable generation never collides with user symbols") {
  FreshVarGen gen;
  CHECK(gen.fresh() == "z0");
  CHECK(gen.fresh() == "z1");

  FreshVarGen gen2(1);
  std::map<std::string, int> avoid{{"z1", 1}, {"z2", 1}};
  CHECK(gen2.fresh_avoiding(avoid) == "z3");

  CHECK(is_reserved_symbol("z0"));
  CHECK(is_reserved_symbol("z317"));
  CHECK(!is_reserved_symbol("z"));
  CHECK(!is_reserved_symbol("za"));
  CHECK(!is_reserved_symbol("az1"));
  CHECK(!is_reserved_symbol("q1"));
}

TEST_CASE("collect_symbols sees free, bound and synthesized names") {
  Expr e = mk_forall(
      {{"i", Sort::Int}},
      mk_implies(mk_synth_app("inv", {ivar("c"), avar("A")}, Sort::Bool),
                 ge0(mk_select(avar("A"), ivar("i")))));
  std::map<std::string, int> out;
  collect_symbols(e, out);
  CHECK(out.count("i") == 1);
  CHECK(out.count("c") == 1);
  CHECK(out.count("A") == 1);
  CHECK(out.count("inv") == 1);
}
