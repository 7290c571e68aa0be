#include "synrg/fragment.h"

#include <algorithm>
#include <set>

#include "synrg/errors.h"

namespace synrg {

namespace {

std::string op_label(Op op) {
  switch (op) {
  case Op::Add:
    return "+";
  case Op::Sub:
    return "-";
  case Op::MulConst:
    return "*";
  case Op::Neg:
    return "-";
  case Op::Le:
    return "<=";
  case Op::Lt:
    return "<";
  case Op::Ge:
    return ">=";
  case Op::Gt:
    return ">";
  case Op::Eq:
    return "=";
  case Op::Neq:
    return "distinct";
  case Op::And:
    return "and";
  case Op::Or:
    return "or";
  case Op::Not:
    return "not";
  case Op::Implies:
    return "=>";
  case Op::Ite:
    return "ite";
  }
  return "?";
}

std::string node_label(const Expr &e) {
  switch (e.kind()) {
  case Kind::IntConst:
    return std::to_string(e.int_value());
  case Kind::BoolConst:
    return e.bool_value() ? "true" : "false";
  case Kind::Var:
    return e.name();
  case Kind::Apply:
    return op_label(e.op());
  case Kind::Select:
    return "select";
  case Kind::Store:
    return "store";
  case Kind::SynthApp:
    return e.name();
  case Kind::Quant: {
    std::string s = e.quant_kind() == QuantKind::Forall ? "forall" : "exists";
    s += '(';
    for (std::size_t i = 0; i < e.binders().size(); ++i) {
      if (i)
        s += ' ';
      s += e.binders()[i].first;
    }
    s += ')';
    return s;
  }
  }
  return "?";
}

bool is_comparison(Op op) {
  return op == Op::Le || op == Op::Lt || op == Op::Ge || op == Op::Gt ||
         op == Op::Eq || op == Op::Neq;
}

// Names of quantified variables currently in scope, as a multiset so that
// shadowing nests correctly.
class BoundStack {
public:
  void push(const std::string &name) { names_.push_back(name); }
  void pop(std::size_t n) { names_.resize(names_.size() - n); }
  std::size_t depth() const { return names_.size(); }

  bool holds(const std::string &name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }
  bool mentions(const Expr &e) const {
    if (names_.empty())
      return false;
    for (const auto &[name, sort] : free_variables(e)) {
      (void)sort;
      if (holds(name))
        return true;
    }
    return false;
  }

private:
  std::vector<std::string> names_;
};

// --- classification -------------------------------------------------------

class Classifier {
public:
  FragmentReport run(const Expr &e) {
    path_.push_back(node_label(e));
    walk(e);
    report_.in_fragment = report_.violations.empty();
    return report_;
  }

private:
  FragmentReport report_;
  BoundStack universals_;
  std::vector<std::string> path_;

  std::string location() const {
    std::string s;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i)
        s += '.';
      s += path_[i];
    }
    return s;
  }

  void violation(const std::string &reason) {
    report_.violations.emplace_back(location(), reason);
  }

  template <typename F> void at_child(const Expr &child, F &&f) {
    path_.push_back(node_label(child));
    f();
    path_.pop_back();
  }

  void walk(const Expr &e) {
    if (e.kind() == Kind::Quant && e.quant_kind() == QuantKind::Forall) {
      universal_block(e);
      return;
    }
    for (const Expr &a : e.args())
      at_child(a, [&] { walk(a); });
  }

  // Merges a chain of directly nested universals into one block, splits the
  // body into guard => value, and checks both halves.
  void universal_block(const Expr &e) {
    std::size_t pushed = 0;
    Expr body = e;
    while (body.kind() == Kind::Quant &&
           body.quant_kind() == QuantKind::Forall) {
      for (const auto &[name, sort] : body.binders()) {
        if (sort != Sort::Int)
          violation("quantified variable is not integer-sorted");
        universals_.push(name);
        ++pushed;
      }
      body = body.body();
    }

    Expr guard = mk_bool(true);
    Expr value = body;
    if (body.kind() == Kind::Apply && body.op() == Op::Implies) {
      guard = body.args()[0];
      value = body.args()[1];
    }
    if (!report_.index_guard) {
      report_.index_guard = guard;
      report_.value_constraint = value;
    }

    if (!(guard.kind() == Kind::BoolConst && guard.bool_value()))
      at_child(guard, [&] { check_guard(guard); });
    at_child(value, [&] { check_value(value); });

    universals_.pop(pushed);
  }

  void check_guard(const Expr &g) {
    switch (g.kind()) {
    case Kind::BoolConst:
      return;
    case Kind::Apply:
      break;
    default:
      violation("index guard is not built from index comparisons");
      return;
    }
    switch (g.op()) {
    case Op::And:
    case Op::Or:
      for (const Expr &a : g.args())
        at_child(a, [&] { check_guard(a); });
      return;
    case Op::Not:
      // distinct-sugar: not (= a b)
      if (g.args()[0].kind() == Kind::Apply && g.args()[0].op() == Op::Eq) {
        const Expr &eq = g.args()[0];
        at_child(eq, [&] {
          for (const Expr &side : eq.args())
            at_child(side, [&] { check_index_term(side); });
        });
        return;
      }
      violation("negation in an index guard");
      return;
    default:
      break;
    }
    if (is_comparison(g.op())) {
      for (const Expr &side : g.args())
        at_child(side, [&] { check_index_term(side); });
      return;
    }
    violation("index guard is not built from index comparisons");
  }

  // iterm: either a bare quantified variable, or a linear term with no
  // quantified variables in it at all.
  void check_index_term(const Expr &t) {
    if (t.kind() == Kind::Var && universals_.holds(t.name()))
      return;
    if (universals_.mentions(t)) {
      violation("arithmetic over a quantified index in a guard");
      return;
    }
    check_linear_term(t);
  }

  void check_linear_term(const Expr &t) {
    switch (t.kind()) {
    case Kind::IntConst:
      return;
    case Kind::Var:
      return;
    case Kind::Apply:
      switch (t.op()) {
      case Op::Add:
      case Op::Sub:
      case Op::MulConst:
      case Op::Neg:
        for (const Expr &a : t.args())
          at_child(a, [&] { check_linear_term(a); });
        return;
      default:
        break;
      }
      break;
    default:
      break;
    }
    violation("guard side is not a linear index term");
  }

  void check_value(const Expr &v) {
    switch (v.kind()) {
    case Kind::Quant:
      if (v.quant_kind() == QuantKind::Exists)
        violation("existential nested under a universal");
      else
        violation("universal block nested inside another universal's body");
      return;
    case Kind::Var:
      if (v.sort() == Sort::Int && universals_.holds(v.name()))
        violation("quantified variable used outside an array read index");
      return;
    case Kind::Select:
    case Kind::Store: {
      const Expr &idx = v.args()[1];
      at_child(v.args()[0], [&] { check_value(v.args()[0]); });
      bool bare_bound = idx.kind() == Kind::Var && universals_.holds(idx.name());
      if (!bare_bound) {
        if (universals_.mentions(idx))
          at_child(idx,
                   [&] { violation("arithmetic on a quantified array index"); });
        else
          at_child(idx, [&] { check_value(idx); });
      }
      if (v.kind() == Kind::Store)
        at_child(v.args()[2], [&] { check_value(v.args()[2]); });
      return;
    }
    default:
      for (const Expr &a : v.args())
        at_child(a, [&] { check_value(a); });
      return;
    }
  }
};

// --- index set ------------------------------------------------------------

class IndexCollector {
public:
  IndexSet run(const Expr &e) {
    walk(e);
    return std::move(set_);
  }

private:
  IndexSet set_;
  BoundStack bound_;

  void add(const Expr &t) {
    if (!bound_.mentions(t) && !set_.contains(t))
      set_.terms.push_back(t);
  }

  void walk(const Expr &e) {
    switch (e.kind()) {
    case Kind::Quant: {
      for (const auto &[name, sort] : e.binders()) {
        (void)sort;
        bound_.push(name);
      }
      const Expr &body = e.body();
      if (e.quant_kind() == QuantKind::Forall && body.kind() == Kind::Apply &&
          body.op() == Op::Implies) {
        guard_walk(body.args()[0]);
        walk(body.args()[1]);
      } else {
        walk(body);
      }
      bound_.pop(e.binders().size());
      return;
    }
    case Kind::Select:
      walk(e.args()[0]);
      add(e.args()[1]);
      walk(e.args()[1]);
      return;
    case Kind::Store:
      walk(e.args()[0]);
      add(e.args()[1]);
      walk(e.args()[1]);
      walk(e.args()[2]);
      return;
    default:
      for (const Expr &a : e.args())
        walk(a);
      return;
    }
  }

  // Comparison sides of a universal guard that do not mention quantified
  // variables join the index set whole.
  void guard_walk(const Expr &g) {
    if (g.kind() == Kind::Apply) {
      if (g.op() == Op::And || g.op() == Op::Or || g.op() == Op::Not) {
        for (const Expr &a : g.args())
          guard_walk(a);
        return;
      }
      if (is_comparison(g.op())) {
        for (const Expr &side : g.args()) {
          add(side);
          walk(side);
        }
        return;
      }
    }
    walk(g);
  }
};

// --- skolemization --------------------------------------------------------

enum class Polarity { Positive, Negative, Mixed };

Polarity flip(Polarity p) {
  switch (p) {
  case Polarity::Positive:
    return Polarity::Negative;
  case Polarity::Negative:
    return Polarity::Positive;
  case Polarity::Mixed:
    return Polarity::Mixed;
  }
  return Polarity::Mixed;
}

class Skolemizer {
public:
  explicit Skolemizer(FreshVarGen &gen) : gen_(gen) {}

  SkolemResult run(const Expr &e) {
    collect_symbols(e, avoid_);
    SkolemResult result;
    result.expr = walk(e, Polarity::Positive, false);
    result.introduced = std::move(introduced_);
    return result;
  }

private:
  FreshVarGen &gen_;
  std::map<std::string, int> avoid_;
  std::vector<std::pair<std::string, Sort>> introduced_;

  Expr walk(const Expr &e, Polarity pol, bool under_forall) {
    switch (e.kind()) {
    case Kind::Quant:
      if (e.quant_kind() == QuantKind::Exists) {
        if (under_forall)
          throw NotSkolemizableError(
              "existential quantifier under a universal");
        if (pol != Polarity::Positive)
          throw NotSkolemizableError(
              "existential quantifier in a negative position");
        Expr body = e.body();
        for (const auto &[name, sort] : e.binders()) {
          std::string fresh = gen_.fresh_avoiding(avoid_);
          avoid_[fresh] = 1;
          introduced_.emplace_back(fresh, sort);
          body = substitute(body, name, mk_var(fresh, sort));
        }
        return walk(body, pol, under_forall);
      }
      return mk_quant(QuantKind::Forall, e.binders(),
                      walk(e.body(), pol, true));
    case Kind::Apply:
      switch (e.op()) {
      case Op::Not:
        return mk_not(walk(e.args()[0], flip(pol), under_forall));
      case Op::Implies:
        return mk_implies(walk(e.args()[0], flip(pol), under_forall),
                          walk(e.args()[1], pol, under_forall));
      case Op::Ite: {
        std::vector<Expr> args;
        args.push_back(walk(e.args()[0], Polarity::Mixed, under_forall));
        args.push_back(walk(e.args()[1], pol, under_forall));
        args.push_back(walk(e.args()[2], pol, under_forall));
        return mk_apply(Op::Ite, std::move(args));
      }
      default: {
        std::vector<Expr> args;
        args.reserve(e.args().size());
        bool changed = false;
        for (const Expr &a : e.args()) {
          args.push_back(walk(a, pol, under_forall));
          changed = changed || !args.back().same_node(a);
        }
        if (!changed)
          return e;
        return mk_apply(e.op(), std::move(args));
      }
      }
    default:
      return e;
    }
  }
};

} // namespace

FragmentReport classify_array_property(const Expr &e) {
  return Classifier().run(e);
}

IndexSet index_terms(const Expr &e) { return IndexCollector().run(e); }

SkolemResult skolemize(const Expr &e, FreshVarGen &gen) {
  return Skolemizer(gen).run(e);
}

SkolemResult skolemize(const Expr &e) {
  FreshVarGen gen;
  return skolemize(e, gen);
}

Expr instantiate_universals(const Expr &e, const IndexSet &r) {
  if (r.terms.empty())
    throw EmptyIndexSetError("universal instantiation over an empty index set");
  switch (e.kind()) {
  case Kind::Quant: {
    Expr body = instantiate_universals(e.body(), r);
    if (e.quant_kind() == QuantKind::Exists)
      return mk_quant(QuantKind::Exists, e.binders(), body);
    // expand binders innermost-first so every combination is produced
    for (auto it = e.binders().rbegin(); it != e.binders().rend(); ++it) {
      std::vector<Expr> conjuncts;
      conjuncts.reserve(r.terms.size());
      for (const Expr &t : r.terms)
        conjuncts.push_back(substitute(body, it->first, t));
      body = mk_and(std::move(conjuncts));
    }
    return body;
  }
  default: {
    if (e.args().empty())
      return e;
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const Expr &a : e.args()) {
      args.push_back(instantiate_universals(a, r));
      changed = changed || !args.back().same_node(a);
    }
    if (!changed)
      return e;
    switch (e.kind()) {
    case Kind::Apply:
      return mk_apply(e.op(), std::move(args));
    case Kind::Select:
      return mk_select(args[0], args[1]);
    case Kind::Store:
      return mk_store(args[0], args[1], args[2]);
    case Kind::SynthApp:
      return mk_synth_app(e.name(), std::move(args), e.sort());
    default:
      return e;
    }
  }
  }
}

} // namespace synrg
