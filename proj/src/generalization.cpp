#include "synrg/generalization.h"

#include <algorithm>
#include <functional>
#include <map>
#include <ostream>

#include "synrg/errors.h"
#include "synrg/sygus_io.h"

namespace synrg {

namespace {

// Positional mapping between bound variable names of two expressions.
class AlphaEnv {
public:
  void push(const std::string &a, const std::string &b) {
    frames_.emplace_back(a, b);
  }
  void pop(std::size_t n) { frames_.resize(frames_.size() - n); }

  // Free names must be identical; bound names must be bound at the same
  // position (innermost frame mentioning either name decides).
  bool vars_agree(const std::string &a, const std::string &b) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      if (it->first == a || it->second == b)
        return it->first == a && it->second == b;
    }
    return a == b;
  }

private:
  std::vector<std::pair<std::string, std::string>> frames_;
};

bool alpha_rec(const Expr &a, const Expr &b, AlphaEnv &env) {
  if (a.kind() != b.kind())
    return false;
  switch (a.kind()) {
  case Kind::IntConst:
    return a.int_value() == b.int_value();
  case Kind::BoolConst:
    return a.bool_value() == b.bool_value();
  case Kind::Var:
    return a.sort() == b.sort() && env.vars_agree(a.name(), b.name());
  case Kind::Quant: {
    if (a.quant_kind() != b.quant_kind() ||
        a.binders().size() != b.binders().size())
      return false;
    for (std::size_t i = 0; i < a.binders().size(); ++i) {
      if (a.binders()[i].second != b.binders()[i].second)
        return false;
      env.push(a.binders()[i].first, b.binders()[i].first);
    }
    bool ok = alpha_rec(a.body(), b.body(), env);
    env.pop(a.binders().size());
    return ok;
  }
  default:
    break;
  }
  if (a.kind() == Kind::Apply && a.op() != b.op())
    return false;
  if (a.kind() == Kind::SynthApp && a.name() != b.name())
    return false;
  if (a.args().size() != b.args().size())
    return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!alpha_rec(a.args()[i], b.args()[i], env))
      return false;
  return true;
}

// Role of an integer constant position during the simultaneous walk.
enum class ConstClass {
  Read,     // the whole index of an array read: abstractable as z+e
  Bare,     // an ordinary arithmetic position: abstractable as z+f
  Forbidden // multiplier coefficients, store subtrees, compound indices
};

struct ConstSite {
  ConstClass cls;
  std::string array; // for Read sites
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
};

// Collects the integer-constant sites of two structurally aligned
// predicates; fails when they differ anywhere other than at constants.
class PairWalk {
public:
  bool run(const Expr &a, const Expr &b) {
    return walk(a, b, ConstClass::Bare);
  }
  const std::vector<ConstSite> &sites() const { return sites_; }

private:
  std::vector<ConstSite> sites_;
  AlphaEnv env_;

  bool walk(const Expr &a, const Expr &b, ConstClass cls) {
    if (a.kind() != b.kind())
      return false;
    switch (a.kind()) {
    case Kind::IntConst: {
      ConstSite s;
      s.cls = cls;
      s.k1 = a.int_value();
      s.k2 = b.int_value();
      sites_.push_back(s);
      return true;
    }
    case Kind::BoolConst:
      return a.bool_value() == b.bool_value();
    case Kind::Var:
      return a.sort() == b.sort() && env_.vars_agree(a.name(), b.name());
    case Kind::Select: {
      if (!walk(a.args()[0], b.args()[0], ConstClass::Forbidden))
        return false;
      const Expr &i1 = a.args()[1];
      const Expr &i2 = b.args()[1];
      if (i1.kind() == Kind::IntConst && i2.kind() == Kind::IntConst &&
          a.args()[0].kind() == Kind::Var) {
        ConstSite s;
        s.cls = ConstClass::Read;
        s.array = a.args()[0].name();
        s.k1 = i1.int_value();
        s.k2 = i2.int_value();
        sites_.push_back(s);
        return true;
      }
      // compound index: constants within cannot shift soundly
      return walk(i1, i2, ConstClass::Forbidden);
    }
    case Kind::Store:
      return walk(a.args()[0], b.args()[0], ConstClass::Forbidden) &&
             walk(a.args()[1], b.args()[1], ConstClass::Forbidden) &&
             walk(a.args()[2], b.args()[2], ConstClass::Forbidden);
    case Kind::Quant: {
      if (a.quant_kind() != b.quant_kind() ||
          a.binders().size() != b.binders().size())
        return false;
      for (std::size_t i = 0; i < a.binders().size(); ++i) {
        if (a.binders()[i].second != b.binders()[i].second)
          return false;
        env_.push(a.binders()[i].first, b.binders()[i].first);
      }
      bool ok = walk(a.body(), b.body(), cls);
      env_.pop(a.binders().size());
      return ok;
    }
    case Kind::Apply: {
      if (a.op() != b.op() || a.args().size() != b.args().size())
        return false;
      if (a.op() == Op::MulConst) {
        return walk(a.args()[0], b.args()[0], ConstClass::Forbidden) &&
               walk(a.args()[1], b.args()[1], cls);
      }
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!walk(a.args()[i], b.args()[i], cls))
          return false;
      return true;
    }
    case Kind::SynthApp: {
      if (a.name() != b.name() || a.args().size() != b.args().size())
        return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!walk(a.args()[i], b.args()[i], cls))
          return false;
      return true;
    }
    }
    return false;
  }
};

// Rebuilds phi1 with the chosen sites replaced by fresh_var + offset.  Visits
// integer constants in the same depth-first order as PairWalk.
class TemplateBuilder {
public:
  TemplateBuilder(const Expr &ph, const std::map<std::size_t, std::int64_t> &o)
      : placeholder_(ph), offsets_(o) {}

  Expr run(const Expr &e) {
    cursor_ = 0;
    return rebuild(e);
  }

private:
  Expr placeholder_;
  const std::map<std::size_t, std::int64_t> &offsets_;
  std::size_t cursor_ = 0;

  Expr rebuild(const Expr &e) {
    switch (e.kind()) {
    case Kind::IntConst: {
      auto it = offsets_.find(cursor_++);
      if (it == offsets_.end())
        return e;
      if (it->second == 0)
        return placeholder_;
      return mk_apply(Op::Add, {placeholder_, mk_int(it->second)});
    }
    case Kind::BoolConst:
    case Kind::Var:
      return e;
    case Kind::Select: {
      Expr arr = rebuild(e.args()[0]);
      const Expr &idx = e.args()[1];
      if (idx.kind() == Kind::IntConst && e.args()[0].kind() == Kind::Var) {
        auto it = offsets_.find(cursor_++);
        if (it == offsets_.end())
          return mk_select(arr, idx);
        Expr z = it->second == 0
                     ? placeholder_
                     : mk_apply(Op::Add, {placeholder_, mk_int(it->second)});
        return mk_select(arr, z);
      }
      return mk_select(arr, rebuild(idx));
    }
    case Kind::Store: {
      Expr arr = rebuild(e.args()[0]);
      Expr idx = rebuild(e.args()[1]);
      Expr val = rebuild(e.args()[2]);
      return mk_store(arr, idx, val);
    }
    case Kind::Quant:
      return mk_quant(e.quant_kind(), e.binders(), rebuild(e.body()));
    case Kind::Apply: {
      std::vector<Expr> args;
      args.reserve(e.args().size());
      for (const Expr &a : e.args())
        args.push_back(rebuild(a));
      return mk_apply(e.op(), std::move(args));
    }
    case Kind::SynthApp: {
      std::vector<Expr> args;
      args.reserve(e.args().size());
      for (const Expr &a : e.args())
        args.push_back(rebuild(a));
      return mk_synth_app(e.name(), std::move(args), e.sort());
    }
    }
    return e;
  }
};

std::string pick_placeholder(const Expr &a, const Expr &b) {
  std::map<std::string, int> used;
  collect_symbols(a, used);
  collect_symbols(b, used);
  std::string name = "?z";
  int n = 0;
  while (used.count(name))
    name = "?z" + std::to_string(n++);
  return name;
}

bool substitution_reproduces(const Expr &tmpl, const std::string &ph,
                             std::int64_t base, const Expr &phi) {
  Expr inst = simplify(substitute(tmpl, ph, mk_int(base)));
  return alpha_equivalent(inst, simplify(phi));
}

// Reads the base index for psi off the first placeholder position of the
// template, walking both in lockstep.
std::optional<std::int64_t> solve_base(const Expr &tmpl, const Expr &psi,
                                       const std::string &ph, AlphaEnv &env) {
  if (tmpl.kind() == Kind::Var && tmpl.name() == ph) {
    if (psi.kind() == Kind::IntConst)
      return psi.int_value();
    return std::nullopt;
  }
  if (tmpl.kind() == Kind::Apply && tmpl.op() == Op::Add &&
      tmpl.args().size() == 2 && tmpl.args()[0].kind() == Kind::Var &&
      tmpl.args()[0].name() == ph &&
      tmpl.args()[1].kind() == Kind::IntConst) {
    if (psi.kind() == Kind::IntConst)
      return psi.int_value() - tmpl.args()[1].int_value();
    return std::nullopt;
  }
  if (tmpl.kind() != psi.kind())
    return std::nullopt;
  if (tmpl.kind() == Kind::Quant) {
    if (tmpl.quant_kind() != psi.quant_kind() ||
        tmpl.binders().size() != psi.binders().size())
      return std::nullopt;
    for (std::size_t i = 0; i < tmpl.binders().size(); ++i)
      env.push(tmpl.binders()[i].first, psi.binders()[i].first);
    auto r = solve_base(tmpl.body(), psi.body(), ph, env);
    env.pop(tmpl.binders().size());
    return r;
  }
  if (tmpl.args().size() != psi.args().size())
    return std::nullopt;
  for (std::size_t i = 0; i < tmpl.args().size(); ++i)
    if (auto r = solve_base(tmpl.args()[i], psi.args()[i], ph, env))
      return r;
  return std::nullopt;
}

std::optional<MatchWitness> match_pair(const Expr &phi1, const Expr &phi2) {
  PairWalk walk;
  if (!walk.run(phi1, phi2))
    return std::nullopt;
  const auto &sites = walk.sites();

  std::vector<std::size_t> abstracted;
  std::int64_t delta = 0;
  bool have_delta = false;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].k1 == sites[i].k2)
      continue;
    if (sites[i].cls == ConstClass::Forbidden)
      return std::nullopt;
    std::int64_t d = sites[i].k2 - sites[i].k1;
    if (have_delta && d != delta)
      return std::nullopt;
    delta = d;
    have_delta = true;
    abstracted.push_back(i);
  }
  if (!have_delta) {
    // alpha-equal predicates: abstract every plain read index
    for (std::size_t i = 0; i < sites.size(); ++i)
      if (sites[i].cls == ConstClass::Read)
        abstracted.push_back(i);
  }
  if (abstracted.empty())
    return std::nullopt;
  bool any_read = false;
  for (std::size_t i : abstracted)
    any_read = any_read || sites[i].cls == ConstClass::Read;
  if (!any_read)
    return std::nullopt;

  std::int64_t base1 = sites[abstracted.front()].k1;
  for (std::size_t i : abstracted)
    base1 = std::min(base1, sites[i].k1);

  MatchWitness w;
  w.fresh_var = pick_placeholder(phi1, phi2);
  std::map<std::size_t, std::int64_t> offsets;
  for (std::size_t i : abstracted) {
    std::int64_t e = sites[i].k1 - base1;
    offsets[i] = e;
    if (sites[i].cls == ConstClass::Read)
      w.read_offsets.emplace_back(sites[i].array, e);
    else
      w.const_offsets.push_back(e);
  }
  w.base_indices.insert(base1);
  w.base_indices.insert(base1 + delta);

  Expr ph = mk_var(w.fresh_var, Sort::Int);
  w.generalized = TemplateBuilder(ph, offsets).run(phi1);

  if (!substitution_reproduces(w.generalized, w.fresh_var, base1, phi1) ||
      !substitution_reproduces(w.generalized, w.fresh_var, base1 + delta,
                               phi2))
    return std::nullopt;
  return w;
}

// --- bottom-up generalization ---------------------------------------------

struct MatchSet {
  std::vector<Expr> members;
  std::optional<MatchWitness> witness;
};

void flatten(const Expr &e, Op op, std::vector<Expr> &out) {
  if (e.kind() == Kind::Apply && e.op() == op) {
    for (const Expr &a : e.args())
      flatten(a, op, out);
  } else {
    out.push_back(e);
  }
}

class Generalizer {
public:
  Generalizer(int b, FreshVarGen &gen, std::ostream *trace,
              std::map<std::string, int> avoid)
      : b_(b), gen_(gen), trace_(trace), avoid_(std::move(avoid)) {}

  Expr walk(const Expr &e) {
    switch (e.kind()) {
    case Kind::Apply:
      if (e.op() == Op::And || e.op() == Op::Or)
        return junction(e);
      break;
    case Kind::Quant:
      return mk_quant(e.quant_kind(), e.binders(), walk(e.body()));
    default:
      break;
    }
    if (e.args().empty())
      return e;
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const Expr &a : e.args()) {
      args.push_back(walk(a));
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

private:
  int b_;
  FreshVarGen &gen_;
  std::ostream *trace_;
  std::map<std::string, int> avoid_;

  bool try_join(MatchSet &set, const Expr &psi) {
    if (!set.witness) {
      auto w = match_pair(set.members.front(), psi);
      if (!w)
        return false;
      set.witness = std::move(w);
      set.members.push_back(psi);
      return true;
    }
    AlphaEnv env;
    auto base = solve_base(set.witness->generalized, psi,
                           set.witness->fresh_var, env);
    if (!base)
      return false;
    if (!substitution_reproduces(set.witness->generalized,
                                 set.witness->fresh_var, *base, psi))
      return false;
    set.witness->base_indices.insert(*base);
    set.members.push_back(psi);
    return true;
  }

  bool spans(const MatchWitness &w) const {
    std::int64_t hi = b_ - 1 - w.max_read_offset();
    if (hi < 0)
      return false;
    std::set<std::int64_t> want;
    for (std::int64_t i = 0; i <= hi; ++i)
      want.insert(i);
    return w.base_indices == want;
  }

  Expr junction(const Expr &e) {
    Op op = e.op();
    std::vector<Expr> walked;
    walked.reserve(e.args().size());
    bool changed = false;
    for (const Expr &a : e.args()) {
      walked.push_back(walk(a));
      changed = changed || !walked.back().same_node(a);
    }

    std::vector<Expr> ops;
    for (const Expr &w : walked)
      flatten(w, op, ops);

    std::vector<MatchSet> sets;
    for (const Expr &psi : ops) {
      bool joined = false;
      for (MatchSet &s : sets) {
        if (try_join(s, psi)) {
          joined = true;
          break;
        }
      }
      if (!joined)
        sets.push_back(MatchSet{{psi}, std::nullopt});
    }

    bool replaced_any = false;
    std::vector<Expr> result;
    for (MatchSet &s : sets) {
      if (s.witness && spans(*s.witness)) {
        std::string fresh = gen_.fresh_avoiding(avoid_);
        avoid_[fresh] = 1;
        Expr body = substitute(s.witness->generalized, s.witness->fresh_var,
                               mk_var(fresh, Sort::Int));
        QuantKind qk =
            op == Op::And ? QuantKind::Forall : QuantKind::Exists;
        Expr q = mk_quant(qk, {{fresh, Sort::Int}}, body);
        if (trace_)
          trace_set(s, fresh, q);
        result.push_back(q);
        replaced_any = true;
      } else {
        for (const Expr &m : s.members)
          result.push_back(m);
      }
    }

    if (!replaced_any) {
      // keep the original shape when nothing collapses
      if (!changed)
        return e;
      return mk_apply(op, std::move(walked));
    }
    return op == Op::And ? mk_and(std::move(result))
                         : mk_or(std::move(result));
  }

  void trace_set(const MatchSet &s, const std::string &fresh, const Expr &q) {
    std::ostream &os = *trace_;
    os << "match set {";
    for (std::size_t i = 0; i < s.members.size(); ++i) {
      if (i)
        os << ", ";
      os << print_term(s.members[i]);
    }
    os << "} bases {";
    bool first = true;
    for (std::int64_t bi : s.witness->base_indices) {
      if (!first)
        os << ", ";
      os << bi;
      first = false;
    }
    os << "} -> " << fresh << ": " << print_term(q) << "\n";
  }
};

// --- grammar construction -------------------------------------------------

std::string pick_nonterminal(const std::string &preferred,
                             const std::map<std::string, int> &used) {
  std::string name = preferred;
  while (used.count(name))
    name += "_";
  return name;
}

} // namespace

bool alpha_equivalent(const Expr &a, const Expr &b) {
  AlphaEnv env;
  return alpha_rec(a, b, env);
}

std::optional<MatchWitness> matching(const Expr &phi1, const Expr &phi2) {
  return match_pair(phi1, phi2);
}

Expr syntactic_generalize(const Expr &e, int b) {
  FreshVarGen gen(1);
  return syntactic_generalize(e, b, gen, nullptr);
}

Expr syntactic_generalize(const Expr &e, int b, FreshVarGen &gen,
                          std::ostream *trace) {
  if (b < 1)
    throw std::invalid_argument("generalization bound must be positive");
  std::map<std::string, int> avoid;
  collect_symbols(e, avoid);
  return Generalizer(b, gen, trace, std::move(avoid)).walk(e);
}

Grammar build_template_grammar(const SynthFun &f, int b) {
  if (f.return_sort == Sort::IntArray)
    throw UnsupportedError("cannot build a template for an array-sorted "
                           "synthesis function");
  std::map<std::string, int> used;
  for (const auto &[name, sort] : f.params)
    used[name] = 1;

  std::string iname = pick_nonterminal("I", used);
  used[iname] = 1;
  Expr I = mk_var(iname, Sort::Int);

  std::vector<Expr> iprods;
  iprods.push_back(mk_int(0));
  iprods.push_back(mk_int(1));
  for (const auto &[name, sort] : f.params)
    if (sort != Sort::IntArray)
      iprods.push_back(mk_var(name, sort));
  iprods.push_back(mk_apply(Op::Sub, {I, I}));
  iprods.push_back(mk_apply(Op::Add, {I, I}));
  for (const auto &[name, sort] : f.params) {
    if (sort != Sort::IntArray)
      continue;
    for (int k = 0; k < b; ++k)
      iprods.push_back(mk_select(mk_var(name, sort), mk_int(k)));
  }

  Grammar g;
  if (f.return_sort == Sort::Int) {
    g.start = iname;
    g.nonterminals = {{iname, Sort::Int}};
    g.productions = {std::move(iprods)};
    return g;
  }

  std::string bname = pick_nonterminal("B", used);
  Expr B = mk_var(bname, Sort::Bool);
  std::vector<Expr> bprods;
  bprods.push_back(mk_apply(Op::And, {B, B}));
  bprods.push_back(mk_apply(Op::Or, {B, B}));
  bprods.push_back(mk_apply(Op::Not, {B}));
  bprods.push_back(mk_apply(Op::Ge, {I, I}));
  bprods.push_back(mk_apply(Op::Le, {I, I}));
  bprods.push_back(mk_apply(Op::Eq, {I, I}));

  g.start = bname;
  g.nonterminals = {{bname, Sort::Bool}, {iname, Sort::Int}};
  g.productions = {std::move(bprods), std::move(iprods)};
  return g;
}

Grammar build_generalization_grammar(const Expr &candidate,
                                     const SynthFun &f) {
  std::map<std::string, int> used;
  for (const auto &[name, sort] : f.params)
    used[name] = 1;
  collect_symbols(candidate, used);

  std::string iname = pick_nonterminal("I", used);
  used[iname] = 1;
  Expr I = mk_var(iname, Sort::Int);

  std::vector<Expr> iprods;
  iprods.push_back(mk_int(0));
  iprods.push_back(mk_int(1));
  for (const auto &[name, sort] : f.params)
    if (sort != Sort::IntArray)
      iprods.push_back(mk_var(name, sort));
  iprods.push_back(mk_apply(Op::Add, {I, I}));
  iprods.push_back(mk_apply(Op::Sub, {I, I}));

  // maximal predicates: subtrees not rooted at a conjunction/disjunction
  std::vector<Expr> preds;
  std::function<void(const Expr &)> collect = [&](const Expr &e) {
    if (e.kind() == Kind::Apply && (e.op() == Op::And || e.op() == Op::Or)) {
      for (const Expr &a : e.args())
        collect(a);
      return;
    }
    if (e.sort() != Sort::Bool)
      return;
    for (const Expr &p : preds)
      if (p == e)
        return;
    preds.push_back(e);
  };
  collect(candidate);

  std::string bname = pick_nonterminal("B", used);
  Expr B = mk_var(bname, Sort::Bool);
  std::vector<Expr> bprods;
  bprods.push_back(mk_apply(Op::And, {B, B}));
  bprods.push_back(mk_apply(Op::Or, {B, B}));
  bprods.push_back(mk_apply(Op::Ge, {I, I}));
  bprods.push_back(mk_apply(Op::Le, {I, I}));
  bprods.push_back(mk_apply(Op::Eq, {I, I}));
  for (const Expr &p : preds)
    bprods.push_back(p);
  // range-restricted variants: the quantified variable is confined to a
  // synthesizable half-open interval
  for (const Expr &p : preds) {
    if (p.kind() != Kind::Quant)
      continue;
    const auto &[vname, vsort] = p.binders().front();
    Expr v = mk_var(vname, vsort);
    Expr lo = mk_apply(Op::Le, {I, v});
    Expr hi = mk_apply(Op::Lt, {v, I});
    Expr body = p.binders().size() == 1
                    ? p.body()
                    : mk_quant(p.quant_kind(),
                               {p.binders().begin() + 1, p.binders().end()},
                               p.body());
    Expr ranged;
    if (p.quant_kind() == QuantKind::Forall)
      ranged = mk_forall({{vname, vsort}},
                         mk_implies(mk_and({lo, hi}), body));
    else
      ranged = mk_exists({{vname, vsort}}, mk_and({lo, hi, body}));
    bprods.push_back(ranged);
  }

  Grammar g;
  if (f.return_sort == Sort::Int) {
    iprods.push_back(candidate.sort() == Sort::Int ? candidate : mk_int(0));
    g.start = iname;
    g.nonterminals = {{iname, Sort::Int}};
    g.productions = {std::move(iprods)};
    return g;
  }
  g.start = bname;
  g.nonterminals = {{bname, Sort::Bool}, {iname, Sort::Int}};
  g.productions = {std::move(bprods), std::move(iprods)};
  return g;
}

} // namespace synrg
