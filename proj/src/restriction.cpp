#include "synrg/restriction.h"

#include <stdexcept>

namespace synrg {

namespace {

// (forall ((i Int) (j Int)) P) -> (forall ((i Int)) (forall ((j Int)) P)),
// applied everywhere so later passes only see single-variable binders.
Expr desugar_binders(const Expr &e) {
  switch (e.kind()) {
  case Kind::Quant: {
    Expr body = desugar_binders(e.body());
    const auto &bs = e.binders();
    Expr out = body;
    for (std::size_t i = bs.size(); i-- > 0;)
      out = mk_quant(e.quant_kind(), {bs[i]}, out);
    return out;
  }
  case Kind::IntConst:
  case Kind::BoolConst:
  case Kind::Var:
    return e;
  default: {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto &a : e.args()) {
      args.push_back(desugar_binders(a));
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

Expr range_guard(const Expr &t, int b) {
  return mk_apply(Op::And, {mk_apply(Op::Le, {mk_int(0), t}),
                            mk_apply(Op::Lt, {t, mk_int(b)})});
}

struct GuardResult {
  Expr expr;
  std::vector<Expr> pending; // index terms not captured by a binder yet
};

void add_term(std::vector<Expr> &terms, const Expr &t) {
  for (const auto &u : terms)
    if (u == t)
      return;
  terms.push_back(t);
}

GuardResult guard_rec(const Expr &e, int b) {
  switch (e.kind()) {
  case Kind::IntConst:
  case Kind::BoolConst:
  case Kind::Var:
    return {e, {}};
  case Kind::Quant: {
    // single binder after desugaring
    GuardResult body = guard_rec(e.body(), b);
    const std::string &v = e.binders()[0].first;
    std::vector<Expr> still_pending;
    std::vector<Expr> captured; // index terms mentioning this binder
    for (const auto &t : body.pending) {
      if (free_variables(t).count(v))
        add_term(captured, t);
      else
        add_term(still_pending, t);
    }
    Expr new_body = body.expr;
    if (!captured.empty()) {
      std::vector<Expr> guards;
      guards.reserve(captured.size());
      for (const auto &t : captured)
        guards.push_back(range_guard(t, b));
      Expr g = mk_and(std::move(guards));
      new_body = e.quant_kind() == QuantKind::Forall
                     ? mk_implies(g, new_body)
                     : mk_apply(Op::And, {g, new_body});
    }
    return {mk_quant(e.quant_kind(), e.binders(), new_body),
            std::move(still_pending)};
  }
  default: {
    std::vector<Expr> args;
    std::vector<Expr> pending;
    args.reserve(e.args().size());
    for (const auto &a : e.args()) {
      GuardResult r = guard_rec(a, b);
      args.push_back(r.expr);
      for (const auto &t : r.pending)
        add_term(pending, t);
    }
    if (e.kind() == Kind::Select || e.kind() == Kind::Store)
      add_term(pending, args[1]);
    bool changed = false;
    for (std::size_t i = 0; i < args.size(); i++)
      if (!args[i].same_node(e.args()[i])) {
        changed = true;
        break;
      }
    Expr out = e;
    if (changed) {
      switch (e.kind()) {
      case Kind::Apply:
        out = mk_apply(e.op(), std::move(args));
        break;
      case Kind::Select:
        out = mk_select(args[0], args[1]);
        break;
      case Kind::Store:
        out = mk_store(args[0], args[1], args[2]);
        break;
      case Kind::SynthApp:
        out = mk_synth_app(e.name(), std::move(args), e.sort());
        break;
      default:
        break;
      }
    }
    return {out, std::move(pending)};
  }
  }
}

} // namespace

BoundResult bound_quantification(const Expr &e, int b) {
  GuardResult r = guard_rec(desugar_binders(e), b);
  return {r.expr, std::move(r.pending)};
}

namespace {

Expr expand_quantifiers(const Expr &e, int b) {
  switch (e.kind()) {
  case Kind::IntConst:
  case Kind::BoolConst:
  case Kind::Var:
    return e;
  case Kind::Quant: {
    Expr inner = e.body();
    if (e.binders().size() > 1) {
      std::vector<Binder> rest(e.binders().begin() + 1, e.binders().end());
      inner = mk_quant(e.quant_kind(), std::move(rest), inner);
    }
    inner = expand_quantifiers(inner, b);
    const std::string &v = e.binders()[0].first;
    std::vector<Expr> instances;
    instances.reserve(b);
    for (int k = 0; k < b; k++)
      instances.push_back(substitute(inner, v, mk_int(k)));
    return e.quant_kind() == QuantKind::Forall ? mk_and(std::move(instances))
                                               : mk_or(std::move(instances));
  }
  default: {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto &a : e.args()) {
      args.push_back(expand_quantifiers(a, b));
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

} // namespace

Expr remove_quantifiers(const Expr &e, int b) {
  return simplify(expand_quantifiers(e, b));
}

Expr restrict_constraint(const Expr &c, int b) {
  BoundResult r = bound_quantification(c, b);
  Expr guarded = r.expr;
  if (!r.free_index_terms.empty()) {
    std::vector<Expr> guards;
    guards.reserve(r.free_index_terms.size());
    for (const auto &t : r.free_index_terms)
      guards.push_back(range_guard(t, b));
    guarded = mk_implies(mk_and(std::move(guards)), guarded);
  }
  return remove_quantifiers(guarded, b);
}

BoundedProblem restrict_spec(const Problem &p, int b) {
  if (b < 1)
    throw std::invalid_argument("restriction bound must be positive");
  BoundedProblem bp;
  bp.base = p;
  bp.bound = b;
  bp.constraints.reserve(p.constraints.size());
  for (const auto &c : p.constraints)
    bp.constraints.push_back(restrict_constraint(c, b));
  return bp;
}

} // namespace synrg
