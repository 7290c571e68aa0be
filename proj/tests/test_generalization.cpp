#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synrg/generalization.h"
#include "synrg/restriction.h"
#include "synrg/eval.h"
#include "synrg/sygus_io.h"
#include "testutil.h"

using namespace synrg;
namespace tu = synrg::testutil;

namespace {

Expr ivar(const std::string &n) { return mk_var(n, Sort::Int); }
Expr avar(const std::string &n) { return mk_var(n, Sort::IntArray); }

Expr sel(const std::string &a, std::int64_t k) {
  return mk_select(avar(a), mk_int(k));
}

Expr ge0(const Expr &t) { return mk_apply(Op::Ge, {t, mk_int(0)}); }

} // namespace

TEST_CASE("alpha equivalence ignores binder names only") {
  Expr e1 = mk_forall({{"i", Sort::Int}},
                      ge0(mk_select(avar("A"), ivar("i"))));
  Expr e2 = mk_forall({{"j", Sort::Int}},
                      ge0(mk_select(avar("A"), ivar("j"))));
  CHECK(alpha_equivalent(e1, e2));
  CHECK(alpha_equivalent(e1, e1));

  Expr other_array = mk_forall({{"j", Sort::Int}},
                               ge0(mk_select(avar("B"), ivar("j"))));
  CHECK(!alpha_equivalent(e1, other_array));

  Expr exists = mk_exists({{"j", Sort::Int}},
                          ge0(mk_select(avar("A"), ivar("j"))));
  CHECK(!alpha_equivalent(e1, exists));
}

TEST_CASE("same-array reads at shifted constants match") {
  Expr p1 = mk_apply(Op::Gt, {sel("A", 0), mk_int(0)});
  Expr p2 = mk_apply(Op::Gt, {sel("A", 1), mk_int(0)});
  auto w = matching(p1, p2);
  REQUIRE(w.has_value());
  CHECK(w->base_indices == std::set<std::int64_t>{0, 1});
  REQUIRE(w->read_offsets.size() == 1);
  CHECK(w->read_offsets[0] == std::pair<std::string, std::int64_t>{"A", 0});

  // substituting each base index back reproduces the matched predicate
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(0))) ==
        simplify(p1));
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(1))) ==
        simplify(p2));
}

TEST_CASE("predicates with no shared shape do not match") {
  Expr p1 = mk_apply(Op::Gt, {sel("A", 0), mk_int(0)});
  Expr p2 = mk_apply(Op::Gt, {ivar("c"), mk_int(0)});
  CHECK(!matching(p1, p2).has_value());
}

TEST_CASE("offset chains match with distinct read offsets") {
  Expr p1 = mk_apply(Op::Lt, {sel("A", 0), sel("A", 1)});
  Expr p2 = mk_apply(Op::Lt, {sel("A", 1), sel("A", 2)});
  auto w = matching(p1, p2);
  REQUIRE(w.has_value());
  CHECK(w->base_indices == std::set<std::int64_t>{0, 1});
  CHECK(w->max_read_offset() == 1);
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(0))) ==
        simplify(p1));
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(1))) ==
        simplify(p2));
}

TEST_CASE("constants outside reads join the shared offset") {
  Expr p1 = mk_apply(Op::And, {mk_apply(Op::Eq, {sel("A", 0), mk_int(0)}),
                               mk_apply(Op::Lt, {mk_int(0), ivar("k")})});
  Expr p2 = mk_apply(Op::And, {mk_apply(Op::Eq, {sel("A", 1), mk_int(1)}),
                               mk_apply(Op::Lt, {mk_int(1), ivar("k")})});
  auto w = matching(p1, p2);
  REQUIRE(w.has_value());
  CHECK(w->base_indices == std::set<std::int64_t>{0, 1});
  CHECK(!w->const_offsets.empty());
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(0))) ==
        simplify(p1));
  CHECK(simplify(substitute(w->generalized, w->fresh_var, mk_int(1))) ==
        simplify(p2));
}

TEST_CASE("spanning conjunctions collapse to a universal") {
  Expr e = mk_and({ge0(sel("A", 0)), ge0(sel("A", 1)),
                   mk_apply(Op::Gt, {ivar("c"), mk_int(0)})});
  Expr g = syntactic_generalize(e, 2);
  Expr expected = mk_apply(
      Op::And,
      {mk_forall({{"q", Sort::Int}}, ge0(mk_select(avar("A"), ivar("q")))),
       mk_apply(Op::Gt, {ivar("c"), mk_int(0)})});
  CHECK(alpha_equivalent(g, expected));
  // the folded constant reads are gone
  CHECK(!tu::reads_const_index(g, "A", 0));
  CHECK(!tu::reads_const_index(g, "A", 1));
}

TEST_CASE("nested disjunctions generalize inside-out to forall-exists") {
  auto eq = [](int i, int j) {
    return mk_apply(Op::Eq, {sel("A", i), sel("B", j)});
  };
  Expr e = mk_apply(Op::And, {mk_apply(Op::Or, {eq(0, 0), eq(0, 1)}),
                              mk_apply(Op::Or, {eq(1, 0), eq(1, 1)})});
  Expr g = syntactic_generalize(e, 2);
  Expr expected = mk_forall(
      {{"p", Sort::Int}},
      mk_exists({{"q", Sort::Int}},
                mk_apply(Op::Eq, {mk_select(avar("A"), ivar("p")),
                                  mk_select(avar("B"), ivar("q"))})));
  CHECK(alpha_equivalent(g, expected));
}

TEST_CASE("offset comparisons generalize over the shortened base range") {
  Expr e = mk_and({mk_apply(Op::Lt, {sel("A", 0), sel("A", 1)}),
                   mk_apply(Op::Lt, {sel("A", 1), sel("A", 2)})});
  Expr g = syntactic_generalize(e, 3);
  Expr expected = mk_forall(
      {{"q", Sort::Int}},
      mk_apply(Op::Lt,
               {mk_select(avar("A"), ivar("q")),
                mk_select(avar("A"),
                          mk_apply(Op::Add, {ivar("q"), mk_int(1)}))}));
  CHECK(alpha_equivalent(g, expected));
}

TEST_CASE("non-spanning sets are left verbatim") {
  Expr e = mk_apply(Op::And, {ge0(sel("A", 0)),
                              mk_apply(Op::Gt, {ivar("c"), mk_int(0)})});
  CHECK(syntactic_generalize(e, 2) == e);

  // {0} alone does not span {0, 1}
  Expr partial = mk_apply(Op::And, {ge0(sel("A", 0)), ge0(sel("B", 1))});
  CHECK(syntactic_generalize(partial, 2) == partial);
}

TEST_CASE("expressions without matchable structure are fixed points") {
  CHECK(syntactic_generalize(mk_apply(Op::Gt, {ivar("c"), mk_int(0)}), 2) ==
        mk_apply(Op::Gt, {ivar("c"), mk_int(0)}));
  Expr single = ge0(sel("A", 0));
  CHECK(syntactic_generalize(single, 2) == single);
}

TEST_CASE("fresh quantifier variables are numbered in discovery order") {
  Expr e = mk_and({ge0(sel("A", 0)), ge0(sel("A", 1)),
                   mk_apply(Op::Le, {sel("B", 0), mk_int(0)}),
                   mk_apply(Op::Le, {sel("B", 1), mk_int(0)})});
  FreshVarGen gen(1);
  Expr g = syntactic_generalize(e, 2, gen, nullptr);
  // two quantifiers were introduced, numbered from z1
  CHECK(gen.next_index() >= 3);
  std::map<std::string, int> syms;
  collect_symbols(g, syms);
  CHECK(syms.count("z1") == 1);
  CHECK(syms.count("z2") == 1);
}

TEST_CASE("bounded-domain agreement after generalizing random candidates") {
  int checked = 0;
  for (int b : {2, 3}) {
    tu::CandidateGen gen(300 + b, b);
    for (int k = 0; k < 100; ++k) {
      Expr e = gen.boolean(4);
      Expr g = syntactic_generalize(e, b);
      Expr back = restrict_constraint(g, b);
      CAPTURE(print_term(e));
      CAPTURE(print_term(g));
      CHECK(tu::equiv_window(e, back, b, -1, 1));
      ++checked;
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("template grammars follow the bounded-read shape") {
  SynthFun f;
  f.name = "h";
  f.params = {{"arr1", Sort::IntArray},
              {"arr2", Sort::IntArray},
              {"y", Sort::Int},
              {"z", Sort::Int}};
  f.return_sort = Sort::Bool;
  Grammar g = build_template_grammar(f, 2);

  REQUIRE(g.nonterminals.size() == 2);
  CHECK(g.nonterminals[0].second == Sort::Bool);
  CHECK(g.nonterminals[1].second == Sort::Int);
  CHECK(g.start == g.nonterminals[0].first);

  const auto &bprods = g.productions[0];
  const auto &iprods = g.productions[1];
  REQUIRE(bprods.size() == 6); // and, or, not, >=, <=, =
  // I ::= 0 | 1 | y | z | I-I | I+I | arr1[0] | arr1[1] | arr2[0] | arr2[1]
  REQUIRE(iprods.size() == 10);
  CHECK(iprods[0] == mk_int(0));
  CHECK(iprods[1] == mk_int(1));
  CHECK(iprods[2] == ivar("y"));
  CHECK(iprods[3] == ivar("z"));
  int reads = 0;
  for (const Expr &p : iprods)
    if (p.kind() == Kind::Select) {
      ++reads;
      CHECK(p.args()[1].kind() == Kind::IntConst);
      CHECK(p.args()[1].int_value() >= 0);
      CHECK(p.args()[1].int_value() < 2);
    }
  CHECK(reads == 4);
}

TEST_CASE("template grammar degenerates cleanly without arrays or booleans") {
  SynthFun f;
  f.name = "g";
  f.params = {{"x", Sort::Int}};
  f.return_sort = Sort::Int;
  Grammar g = build_template_grammar(f, 2);
  REQUIRE(g.nonterminals.size() == 1);
  CHECK(g.nonterminals[0].second == Sort::Int);
  CHECK(g.productions[0].size() == 5); // 0, 1, x, I-I, I+I

  SynthFun one_read;
  one_read.name = "r";
  one_read.params = {{"A", Sort::IntArray}};
  one_read.return_sort = Sort::Bool;
  Grammar gr = build_template_grammar(one_read, 1);
  int reads = 0;
  for (const Expr &p : gr.productions[1])
    if (p.kind() == Kind::Select)
      ++reads;
  CHECK(reads == 1);

  SynthFun bad;
  bad.name = "b";
  bad.params = {{"A", Sort::IntArray}};
  bad.return_sort = Sort::IntArray;
  CHECK_THROWS_AS(build_template_grammar(bad, 2), UnsupportedError);
}

TEST_CASE("generalization grammars seed the candidate's predicates") {
  SynthFun f;
  f.name = "h";
  f.params = {{"x", Sort::IntArray}, {"y", Sort::Int}, {"z", Sort::Int}};
  f.return_sort = Sort::Bool;

  Expr quantified = mk_forall(
      {{"i", Sort::Int}},
      mk_apply(Op::Gt, {mk_select(avar("x"), ivar("i")), mk_int(0)}));
  Expr candidate =
      mk_apply(Op::Or, {quantified,
                        mk_apply(Op::Eq, {ivar("y"), mk_int(0)})});
  Grammar g = build_generalization_grammar(candidate, f);

  const auto &bprods = g.productions[0];
  bool has_verbatim_quant = false, has_verbatim_atom = false,
       has_ranged = false;
  for (const Expr &p : bprods) {
    if (alpha_equivalent(p, quantified))
      has_verbatim_quant = true;
    if (p == mk_apply(Op::Eq, {ivar("y"), mk_int(0)}))
      has_verbatim_atom = true;
    if (p.kind() == Kind::Quant && p.body().kind() == Kind::Apply &&
        p.body().op() == Op::Implies)
      has_ranged = true;
  }
  CHECK(has_verbatim_quant);
  CHECK(has_verbatim_atom);
  CHECK(has_ranged);

  // the range-restricted variant bounds the binder with synthesizable ends
  for (const Expr &p : bprods) {
    if (p.kind() != Kind::Quant || p.body().kind() != Kind::Apply ||
        p.body().op() != Op::Implies)
      continue;
    const Expr &guard = p.body().args()[0];
    REQUIRE(guard.op() == Op::And);
    std::map<std::string, int> syms;
    collect_symbols(guard, syms);
    bool mentions_nonterminal = false;
    for (const auto &[name, cnt] : syms)
      if (g.is_nonterminal(name))
        mentions_nonterminal = true;
    CHECK(mentions_nonterminal);
  }
}

TEST_CASE("existential predicates get a conjunction-guarded ranged variant") {
  SynthFun f;
  f.name = "h";
  f.params = {{"x", Sort::IntArray}};
  f.return_sort = Sort::Bool;
  Expr candidate = mk_exists(
      {{"i", Sort::Int}},
      mk_apply(Op::Eq, {mk_select(avar("x"), ivar("i")), mk_int(0)}));
  Grammar g = build_generalization_grammar(candidate, f);
  bool has_ranged_exists = false;
  for (const Expr &p : g.productions[0])
    if (p.kind() == Kind::Quant && p.quant_kind() == QuantKind::Exists &&
        p.body().kind() == Kind::Apply && p.body().op() == Op::And)
      has_ranged_exists = true;
  CHECK(has_ranged_exists);
}

TEST_CASE("quantifier-free candidates still seed a usable grammar") {
  SynthFun f;
  f.name = "h";
  f.params = {{"y", Sort::Int}};
  f.return_sort = Sort::Bool;
  Expr candidate = mk_apply(Op::Eq, {ivar("y"), mk_int(0)});
  Grammar g = build_generalization_grammar(candidate, f);
  bool found = false;
  for (const Expr &p : g.productions[0])
    if (p == candidate)
      found = true;
  CHECK(found);
  // the integer nonterminal still has the arithmetic skeleton
  REQUIRE(g.nonterminals.size() == 2);
  CHECK(g.productions[1].size() >= 4);
}
