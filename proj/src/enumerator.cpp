#include "synrg/enumerator.h"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace synrg {

namespace {

using Clock = std::chrono::steady_clock;

// --- grammar terms --------------------------------------------------------

// Nonterminal occurrences of a production, in depth-first order.
void collect_holes(const Expr &e, const Grammar &g,
                   std::vector<std::string> &out) {
  if (e.kind() == Kind::Var && g.is_nonterminal(e.name())) {
    out.push_back(e.name());
    return;
  }
  for (const Expr &a : e.args())
    collect_holes(a, g, out);
}

Expr expand_rec(const Expr &e, const Grammar &g,
                const std::vector<Expr> &fills, std::size_t &cursor) {
  if (e.kind() == Kind::Var && g.is_nonterminal(e.name()))
    return fills[cursor++];
  if (e.args().empty())
    return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const Expr &a : e.args())
    args.push_back(expand_rec(a, g, fills, cursor));
  switch (e.kind()) {
  case Kind::Apply:
    return mk_apply(e.op(), std::move(args));
  case Kind::Select:
    return mk_select(args[0], args[1]);
  case Kind::Store:
    return mk_store(args[0], args[1], args[2]);
  case Kind::Quant:
    return mk_quant(e.quant_kind(), e.binders(), args[0]);
  case Kind::SynthApp:
    return mk_synth_app(e.name(), std::move(args), e.sort());
  default:
    return e;
  }
}

Expr expand(const Expr &production, const Grammar &g,
            const std::vector<Expr> &fills) {
  std::size_t cursor = 0;
  return expand_rec(production, g, fills, cursor);
}

// Output signature of a term on the current input points; the
// observational-equivalence key.
using Sig = std::vector<std::int64_t>;

std::int64_t encode_value(const Value &v) {
  if (const auto *i = std::get_if<std::int64_t>(&v))
    return *i;
  if (const auto *b = std::get_if<bool>(&v))
    return *b ? 1 : 0;
  const auto &a = std::get<ArrayValue>(v);
  std::int64_t h = a.def;
  for (const auto &[k, x] : a.entries)
    h = h * 1000003 + k * 31 + x;
  return h;
}

// Terms of one synthesis function's grammar, grouped by nonterminal and
// size, deduplicated by output signature on the current input points.
class TermPool {
public:
  TermPool(const SynthFun *fun, const Grammar *grammar,
           std::int64_t array_len)
      : fun_(fun), grammar_(grammar), array_len_(array_len) {
    for (std::size_t i = 0; i < grammar->nonterminals.size(); ++i) {
      holes_.emplace_back();
      for (const Expr &prod : grammar->productions[i]) {
        holes_.back().emplace_back();
        collect_holes(prod, *grammar, holes_.back().back());
      }
    }
  }

  void reset(std::vector<Valuation> points) {
    points_ = std::move(points);
    by_size_.clear();
    seen_.assign(grammar_->nonterminals.size(), {});
    built_ = 0;
    total_terms_ = 0;
  }

  void build_to(int size, const Clock::time_point &deadline) {
    while (built_ < size) {
      int s = ++built_;
      by_size_.emplace_back(grammar_->nonterminals.size());
      for (std::size_t nt = 0; nt < grammar_->nonterminals.size(); ++nt)
        build_nt(nt, s, deadline);
    }
  }

  const std::vector<Expr> &start_terms(int size) const {
    return terms(grammar_->start, size);
  }

  const std::vector<Expr> &terms(const std::string &nt, int size) const {
    static const std::vector<Expr> empty;
    if (size < 1 || size > built_)
      return empty;
    return by_size_[size - 1][nt_index(nt)];
  }

  const SynthFun &fun() const { return *fun_; }

private:
  const SynthFun *fun_;
  const Grammar *grammar_;
  std::int64_t array_len_;
  std::vector<std::vector<std::vector<std::string>>> holes_; // [nt][prod]
  std::vector<Valuation> points_;
  // by_size_[s-1][nt] = admitted terms of that size
  std::vector<std::vector<std::vector<Expr>>> by_size_;
  std::vector<std::map<Sig, char>> seen_;
  int built_ = 0;
  std::size_t total_terms_ = 0;

  static constexpr std::size_t kMaxTerms = 200000;

  std::size_t nt_index(const std::string &name) const {
    for (std::size_t i = 0; i < grammar_->nonterminals.size(); ++i)
      if (grammar_->nonterminals[i].first == name)
        return i;
    return 0;
  }

  void admit(std::size_t nt, int size, const Expr &term) {
    if (total_terms_ >= kMaxTerms)
      return;
    Sig sig;
    sig.reserve(points_.size());
    EvalContext ctx;
    ctx.array_len = array_len_;
    for (const Valuation &pt : points_)
      sig.push_back(encode_value(evaluate(term, pt, ctx)));
    if (!seen_[nt].emplace(std::move(sig), 1).second)
      return;
    by_size_[size - 1][nt].push_back(term);
    ++total_terms_;
  }

  void build_nt(std::size_t nt, int size, const Clock::time_point &deadline) {
    const auto &prods = grammar_->productions[nt];
    for (std::size_t pi = 0; pi < prods.size(); ++pi) {
      if (Clock::now() > deadline)
        return;
      const auto &hole_nts = holes_[nt][pi];
      if (hole_nts.empty()) {
        if (size == 1)
          admit(nt, size, prods[pi]);
        continue;
      }
      int budget = size - 1;
      if (static_cast<int>(hole_nts.size()) > budget)
        continue;
      std::vector<Expr> fills(hole_nts.size());
      fill_holes(nt, size, prods[pi], hole_nts, 0, budget, fills, deadline);
    }
  }

  // Distributes `budget` size among the remaining holes (each at least 1).
  void fill_holes(std::size_t nt, int size, const Expr &prod,
                  const std::vector<std::string> &hole_nts, std::size_t at,
                  int budget, std::vector<Expr> &fills,
                  const Clock::time_point &deadline) {
    if (total_terms_ >= kMaxTerms)
      return;
    if (at == hole_nts.size()) {
      if (budget == 0)
        admit(nt, size, expand(prod, *grammar_, fills));
      return;
    }
    if (Clock::now() > deadline)
      return;
    int remaining_after = static_cast<int>(hole_nts.size() - at) - 1;
    for (int s = 1; s <= budget - remaining_after; ++s) {
      for (const Expr &t : terms(hole_nts[at], s)) {
        fills[at] = t;
        fill_holes(nt, size, prod, hole_nts, at + 1, budget - s, fills,
                   deadline);
      }
    }
  }
};

// --- application sites and input points -----------------------------------

struct AppSite {
  std::string fun;
  std::vector<Expr> args;
  std::vector<std::string> binders; // quantified vars in scope at the site
};

void collect_sites(const Expr &e, std::vector<std::string> &scope,
                   std::vector<AppSite> &out) {
  if (e.kind() == Kind::SynthApp) {
    out.push_back({e.name(), e.args(), scope});
    return; // nested applications inside arguments are not supported
  }
  if (e.kind() == Kind::Quant) {
    for (const auto &[name, sort] : e.binders()) {
      (void)sort;
      scope.push_back(name);
    }
    collect_sites(e.body(), scope, out);
    scope.resize(scope.size() - e.binders().size());
    return;
  }
  for (const Expr &a : e.args())
    collect_sites(a, scope, out);
}

// All argument tuples (as parameter valuations) a function is exercised at
// when the constraints are evaluated over the given inputs; quantified
// variables in scope at an application range over [0, array_len).
std::vector<Valuation> input_points(const SynthFun &fun,
                                    const std::vector<AppSite> &sites,
                                    const std::vector<Valuation> &inputs,
                                    std::int64_t array_len) {
  std::vector<Valuation> points;
  auto add = [&](const Valuation &pt) {
    if (std::find(points.begin(), points.end(), pt) == points.end())
      points.push_back(pt);
  };
  EvalContext ctx;
  ctx.array_len = array_len;
  for (const Valuation &v : inputs) {
    for (const AppSite &site : sites) {
      if (site.fun != fun.name)
        continue;
      std::vector<std::int64_t> combo(site.binders.size(), 0);
      while (true) {
        Valuation ext = v;
        for (std::size_t i = 0; i < site.binders.size(); ++i)
          ext[site.binders[i]] = combo[i];
        Valuation pt;
        bool ok = true;
        for (std::size_t i = 0; i < site.args.size(); ++i) {
          try {
            pt[fun.params[i].first] = evaluate(site.args[i], ext, ctx);
          } catch (const EvalError &) {
            ok = false;
            break;
          }
        }
        if (ok)
          add(pt);
        bool more = false;
        for (std::size_t i = 0; i < combo.size(); ++i) {
          if (++combo[i] < array_len) {
            more = true;
            break;
          }
          combo[i] = 0;
        }
        if (!more)
          break;
      }
    }
  }
  return points;
}

// --- infeasibility probes -------------------------------------------------

bool has_synth_app(const Expr &e) {
  if (e.kind() == Kind::SynthApp)
    return true;
  for (const Expr &a : e.args())
    if (has_synth_app(a))
      return true;
  return false;
}

// Probe: a constraint with no synthesized function falsified at a concrete
// valuation can never be satisfied, whatever is synthesized.
bool probe_synth_free(const std::vector<Expr> &constraints,
                      const EnumLimits &limits) {
  for (const Expr &c : constraints) {
    if (has_synth_app(c))
      continue;
    FiniteCheckConfig cfg;
    cfg.array_len = limits.array_len;
    cfg.value_min = limits.value_min;
    cfg.value_max = limits.value_max;
    try {
      if (finite_check(mk_not(c), cfg).sat())
        return true;
    } catch (const OracleTooLarge &) {
      // probe skipped; absence of a verdict is sound
    }
  }
  return false;
}

// Probe: two top-level equalities pinning the same application to different
// constants conflict pointwise.
bool probe_pinned_conflict(const std::vector<Expr> &constraints) {
  std::unordered_map<Expr, Expr, ExprHash> pinned;
  for (const Expr &c : constraints) {
    if (c.kind() != Kind::Apply || c.op() != Op::Eq)
      continue;
    const Expr &l = c.args()[0];
    const Expr &r = c.args()[1];
    const Expr *app = nullptr;
    const Expr *val = nullptr;
    if (l.kind() == Kind::SynthApp &&
        (r.kind() == Kind::IntConst || r.kind() == Kind::BoolConst)) {
      app = &l;
      val = &r;
    } else if (r.kind() == Kind::SynthApp &&
               (l.kind() == Kind::IntConst || l.kind() == Kind::BoolConst)) {
      app = &r;
      val = &l;
    } else {
      continue;
    }
    auto [it, fresh] = pinned.emplace(*app, *val);
    if (!fresh && it->second != *val)
      return true;
  }
  return false;
}

Expr rewrite_subterms(const Expr &e,
                      const std::unordered_map<Expr, Expr, ExprHash> &map) {
  auto it = map.find(e);
  if (it != map.end())
    return it->second;
  if (e.args().empty())
    return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const Expr &a : e.args()) {
    args.push_back(rewrite_subterms(a, map));
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
  case Kind::Quant:
    return mk_quant(e.quant_kind(), e.binders(), args[0]);
  case Kind::SynthApp:
    return mk_synth_app(e.name(), std::move(args), e.sort());
  default:
    return e;
  }
}

// Odometer over valuations of the declared variables.
class ValuationScan {
public:
  ValuationScan(const std::vector<std::pair<std::string, Sort>> &vars,
                const EnumLimits &limits)
      : limits_(limits) {
    for (const auto &[name, sort] : vars) {
      switch (sort) {
      case Sort::Int:
        cells_.push_back({name, -1, false});
        break;
      case Sort::Bool:
        cells_.push_back({name, -1, true});
        break;
      case Sort::IntArray:
        for (std::int64_t i = 0; i < limits.array_len; ++i)
          cells_.push_back({name, i, false});
        break;
      }
    }
    digits_.assign(cells_.size(), 0);
  }

  double space() const {
    double total = 1;
    for (const Cell &c : cells_)
      total *= c.boolean ? 2.0
                         : static_cast<double>(limits_.value_max -
                                               limits_.value_min + 1);
    return total;
  }

  Valuation current() const {
    Valuation v;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const Cell &c = cells_[i];
      if (c.boolean) {
        v[c.var] = digits_[i] != 0;
      } else if (c.array_index < 0) {
        v[c.var] = limits_.value_min + digits_[i];
      } else {
        if (!v.count(c.var))
          v[c.var] = ArrayValue{};
        std::get<ArrayValue>(v[c.var]).entries[c.array_index] =
            limits_.value_min + digits_[i];
      }
    }
    return v;
  }

  bool advance() {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      std::int64_t limit =
          cells_[i].boolean ? 2 : limits_.value_max - limits_.value_min + 1;
      if (++digits_[i] < limit)
        return true;
      digits_[i] = 0;
    }
    return false;
  }

private:
  struct Cell {
    std::string var;
    std::int64_t array_index; // -1 for scalars
    bool boolean;
  };
  const EnumLimits &limits_;
  std::vector<Cell> cells_;
  std::vector<std::int64_t> digits_;
};

// Probe: at some valuation, no assignment to the boolean applications
// satisfies the constraints.  Only run when every application is
// boolean-sorted and none sits under a quantifier, so that each distinct
// application denotes a single value per valuation.
bool probe_bool_exhaustion(const Problem &p, const EnumLimits &limits) {
  std::vector<AppSite> sites;
  std::vector<std::string> scope;
  for (const Expr &c : p.constraints)
    collect_sites(c, scope, sites);
  if (sites.empty())
    return false;
  for (const AppSite &s : sites) {
    if (!s.binders.empty())
      return false;
    const SynthFun *f = p.find_fun(s.fun);
    if (!f || f->return_sort != Sort::Bool)
      return false;
  }

  std::vector<Expr> atoms;
  std::function<void(const Expr &)> grab = [&](const Expr &e) {
    if (e.kind() == Kind::SynthApp) {
      for (const Expr &a : atoms)
        if (a == e)
          return;
      atoms.push_back(e);
      return;
    }
    for (const Expr &a : e.args())
      grab(a);
  };
  for (const Expr &c : p.constraints)
    grab(c);
  if (atoms.empty() || atoms.size() > 10)
    return false;

  ValuationScan scan(p.declared_vars, limits);
  if (scan.space() > 4096.0)
    return false;

  EvalContext ctx;
  ctx.array_len = limits.array_len;
  while (true) {
    Valuation v = scan.current();
    bool satisfiable = false;
    for (std::uint64_t mask = 0; mask < (1ull << atoms.size()); ++mask) {
      std::unordered_map<Expr, Expr, ExprHash> assign;
      for (std::size_t i = 0; i < atoms.size(); ++i)
        assign.emplace(atoms[i], mk_bool((mask >> i) & 1));
      bool all = true;
      for (const Expr &c : p.constraints) {
        if (!evaluate_bool(rewrite_subterms(c, assign), v, ctx)) {
          all = false;
          break;
        }
      }
      if (all) {
        satisfiable = true;
        break;
      }
    }
    if (!satisfiable)
      return true;
    if (!scan.advance())
      return false;
  }
}

// --- the CEGIS loop -------------------------------------------------------

Valuation
default_valuation(const std::vector<std::pair<std::string, Sort>> &vars) {
  Valuation v;
  for (const auto &[name, sort] : vars) {
    switch (sort) {
    case Sort::Int:
      v[name] = std::int64_t{0};
      break;
    case Sort::Bool:
      v[name] = false;
      break;
    case Sort::IntArray:
      v[name] = ArrayValue{};
      break;
    }
  }
  return v;
}

// A deterministic spread of starting inputs.  More initial points mean the
// observational-equivalence dedup separates terms earlier and far fewer
// counterexample rounds are needed.
std::vector<Valuation>
seed_valuations(const std::vector<std::pair<std::string, Sort>> &vars,
                const EnumLimits &limits) {
  auto clip = [&](std::int64_t x) {
    return std::max(limits.value_min, std::min(limits.value_max, x));
  };
  auto uniform = [&](std::int64_t scalar, std::int64_t elem) {
    Valuation v;
    for (const auto &[name, sort] : vars) {
      switch (sort) {
      case Sort::Int:
        v[name] = clip(scalar);
        break;
      case Sort::Bool:
        v[name] = scalar > 0;
        break;
      case Sort::IntArray: {
        ArrayValue a;
        for (std::int64_t i = 0; i < limits.array_len; ++i)
          a.entries[i] = clip(elem);
        v[name] = a;
        break;
      }
      }
    }
    return v;
  };
  std::vector<Valuation> seeds;
  seeds.push_back(default_valuation(vars));
  seeds.push_back(uniform(1, 1));
  seeds.push_back(uniform(-1, -1));
  seeds.push_back(uniform(1, -1));
  seeds.push_back(uniform(-1, 2));
  // ascending and descending ramps to separate index-dependent reads
  Valuation ramp = uniform(1, 0);
  Valuation ramp_down = uniform(2, 0);
  for (auto &[name, value] : ramp)
    if (auto *a = std::get_if<ArrayValue>(&value))
      for (std::int64_t i = 0; i < limits.array_len; ++i)
        a->entries[i] = clip(i);
  for (auto &[name, value] : ramp_down)
    if (auto *a = std::get_if<ArrayValue>(&value))
      for (std::int64_t i = 0; i < limits.array_len; ++i)
        a->entries[i] = clip(limits.array_len - 1 - i);
  seeds.push_back(std::move(ramp));
  seeds.push_back(std::move(ramp_down));
  return seeds;
}

// All ways to split `total` into `parts` components, each in [1, cap].
void size_splits(int total, int parts, int cap, std::vector<int> &acc,
                 std::vector<std::vector<int>> &out) {
  if (parts == 1) {
    if (total >= 1 && total <= cap) {
      acc.push_back(total);
      out.push_back(acc);
      acc.pop_back();
    }
    return;
  }
  for (int s = 1; s <= std::min(cap, total - (parts - 1)); ++s) {
    acc.push_back(s);
    size_splits(total - s, parts - 1, cap, acc, out);
    acc.pop_back();
  }
}

class Cegis {
public:
  Cegis(const Problem &p, const std::map<std::string, Grammar> &grammars,
        const EnumLimits &limits)
      : p_(p), limits_(limits) {
    for (const SynthFun &f : p.synth_funs)
      pools_.emplace_back(&f, &grammars.at(f.name), limits.array_len);
    std::vector<std::string> scope;
    for (const Expr &c : p.constraints)
      collect_sites(c, scope, sites_);
  }

  SynthOutcome run() {
    auto deadline = Clock::now() + limits_.timeout;
    inputs_ = seed_valuations(p_.declared_vars, limits_);

    while (true) {
      // max_candidates caps one round; the wall clock bounds the whole run
      long tested = 0;
      for (TermPool &pool : pools_)
        pool.reset(
            input_points(pool.fun(), sites_, inputs_, limits_.array_len));

      bool restart = false;
      int nfuns = static_cast<int>(pools_.size());
      int max_total = limits_.max_size * nfuns;
      for (int total = nfuns; total <= max_total && !restart; ++total) {
        for (TermPool &pool : pools_)
          pool.build_to(std::min(total, limits_.max_size), deadline);

        std::vector<std::vector<int>> splits;
        std::vector<int> acc;
        size_splits(total, nfuns, limits_.max_size, acc, splits);
        for (const auto &split : splits) {
          auto step = test_split(split, tested, deadline);
          if (!step)
            continue;
          if (std::holds_alternative<Restart>(*step)) {
            restart = true;
            break;
          }
          return std::get<SynthOutcome>(*step);
        }
      }
      if (!restart)
        return SynthTimedOut{};
    }
  }

private:
  struct Restart {};
  using StepResult = std::optional<std::variant<SynthOutcome, Restart>>;

  const Problem &p_;
  const EnumLimits &limits_;
  std::vector<TermPool> pools_;
  std::vector<AppSite> sites_;
  std::vector<Valuation> inputs_;

  StepResult test_split(const std::vector<int> &split, long &tested,
                        const Clock::time_point &deadline) {
    std::vector<const std::vector<Expr> *> lists;
    lists.reserve(pools_.size());
    for (std::size_t i = 0; i < pools_.size(); ++i) {
      lists.push_back(&pools_[i].start_terms(split[i]));
      if (lists.back()->empty())
        return std::nullopt;
    }
    std::vector<std::size_t> idx(pools_.size(), 0);
    while (true) {
      if (++tested > limits_.max_candidates)
        return StepResult{SynthOutcome{SynthTimedOut{}}};
      if (Clock::now() > deadline)
        return StepResult{SynthOutcome{SynthTimedOut{}}};

      std::map<std::string, Expr> bindings;
      for (std::size_t i = 0; i < pools_.size(); ++i)
        bindings[pools_[i].fun().name] = (*lists[i])[idx[i]];
      auto verdict = check_candidate(bindings);
      if (verdict)
        return verdict;

      bool more = false;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        if (++idx[i] < lists[i]->size()) {
          more = true;
          break;
        }
        idx[i] = 0;
      }
      if (!more)
        return std::nullopt;
    }
  }

  Bindings as_fun_defs(const std::map<std::string, Expr> &b) const {
    Bindings out;
    for (const SynthFun &f : p_.synth_funs)
      out[f.name] = FunDef{f.params, b.at(f.name)};
    return out;
  }

  StepResult check_candidate(const std::map<std::string, Expr> &b) {
    Bindings defs = as_fun_defs(b);
    EvalContext ctx;
    ctx.array_len = limits_.array_len;
    ctx.bindings = &defs;
    for (const Valuation &v : inputs_)
      for (const Expr &c : p_.constraints)
        if (!evaluate_bool(c, v, ctx))
          return std::nullopt; // fails a known input; try the next candidate

    // counterexample search, one constraint at a time
    for (const Expr &c : p_.constraints) {
      FiniteCheckConfig cfg;
      cfg.array_len = limits_.array_len;
      cfg.value_min = limits_.value_min;
      cfg.value_max = limits_.value_max;
      cfg.bindings = &defs;
      FiniteCheckResult r;
      try {
        r = finite_check(mk_not(c), cfg);
      } catch (const OracleTooLarge &) {
        return StepResult{SynthOutcome{
            SynthUnknown{"counterexample search space too large"}}};
      }
      if (r.sat()) {
        Valuation full = default_valuation(p_.declared_vars);
        for (auto &[name, value] : *r.witness)
          full[name] = value;
        inputs_.push_back(std::move(full));
        return StepResult{Restart{}};
      }
    }
    return StepResult{SynthOutcome{SynthSolved{b}}};
  }
};

} // namespace

SynthOutcome enumerate_candidates(const Problem &p,
                                  const std::map<std::string, Grammar> &grammars,
                                  const EnumLimits &limits) {
  for (const SynthFun &f : p.synth_funs)
    if (!grammars.count(f.name))
      return SynthUnknown{"no grammar for function " + f.name};
  if (p.synth_funs.empty())
    return SynthSolved{{}};

  if (probe_pinned_conflict(p.constraints))
    return SynthInfeasible{};
  if (probe_synth_free(p.constraints, limits))
    return SynthInfeasible{};
  if (probe_bool_exhaustion(p, limits))
    return SynthInfeasible{};

  return Cegis(p, grammars, limits).run();
}

} // namespace synrg
