#include "synrg/eval.h"

#include <functional>
#include <unordered_map>

namespace synrg {

namespace {

std::int64_t as_int(const Value &v, const char *what) {
  if (const auto *p = std::get_if<std::int64_t>(&v))
    return *p;
  throw EvalError(std::string("expected an integer value in ") + what);
}

bool as_bool(const Value &v, const char *what) {
  if (const auto *p = std::get_if<bool>(&v))
    return *p;
  throw EvalError(std::string("expected a boolean value in ") + what);
}

const ArrayValue &as_array(const Value &v, const char *what) {
  if (const auto *p = std::get_if<ArrayValue>(&v))
    return *p;
  throw EvalError(std::string("expected an array value in ") + what);
}

Value eval_rec(const Expr &e, Valuation &val, const EvalContext &ctx);

bool eval_quant(const Expr &e, Valuation &val, const EvalContext &ctx,
                std::size_t binder_idx) {
  if (binder_idx == e.binders().size())
    return as_bool(eval_rec(e.body(), val, ctx), "quantifier body");
  const std::string &name = e.binders()[binder_idx].first;
  bool universal = e.quant_kind() == QuantKind::Forall;
  auto saved = val.find(name) != val.end()
                   ? std::optional<Value>(val[name])
                   : std::nullopt;
  bool result = universal;
  for (std::int64_t v = 0; v < ctx.array_len; v++) {
    val[name] = v;
    bool b = eval_quant(e, val, ctx, binder_idx + 1);
    if (b != universal) {
      result = !universal;
      break;
    }
  }
  if (saved)
    val[name] = *saved;
  else
    val.erase(name);
  return result;
}

Value eval_rec(const Expr &e, Valuation &val, const EvalContext &ctx) {
  switch (e.kind()) {
  case Kind::IntConst:
    return e.int_value();
  case Kind::BoolConst:
    return e.bool_value();
  case Kind::Var: {
    auto it = val.find(e.name());
    if (it == val.end())
      throw EvalError("unbound variable '" + e.name() + "'");
    return it->second;
  }
  case Kind::Select: {
    const ArrayValue &a = as_array(eval_rec(e.args()[0], val, ctx), "select");
    std::int64_t i = as_int(eval_rec(e.args()[1], val, ctx), "select index");
    return a.get(i);
  }
  case Kind::Store: {
    ArrayValue a = as_array(eval_rec(e.args()[0], val, ctx), "store");
    std::int64_t i = as_int(eval_rec(e.args()[1], val, ctx), "store index");
    std::int64_t v = as_int(eval_rec(e.args()[2], val, ctx), "store value");
    a.entries[i] = v;
    return a;
  }
  case Kind::Quant:
    return eval_quant(e, val, ctx, 0);
  case Kind::SynthApp: {
    if (!ctx.bindings || !ctx.bindings->count(e.name()))
      throw EvalError("no binding for synthesized function '" + e.name() +
                      "'");
    const FunDef &def = ctx.bindings->at(e.name());
    if (def.params.size() != e.args().size())
      throw EvalError("arity mismatch applying '" + e.name() + "'");
    Valuation inner;
    for (std::size_t i = 0; i < def.params.size(); i++)
      inner[def.params[i].first] = eval_rec(e.args()[i], val, ctx);
    return eval_rec(def.body, inner, ctx);
  }
  case Kind::Apply:
    break;
  }

  const auto &args = e.args();
  switch (e.op()) {
  case Op::Add: {
    std::int64_t s = 0;
    for (const auto &a : args)
      s += as_int(eval_rec(a, val, ctx), "+");
    return s;
  }
  case Op::Sub:
    return as_int(eval_rec(args[0], val, ctx), "-") -
           as_int(eval_rec(args[1], val, ctx), "-");
  case Op::MulConst:
    return as_int(eval_rec(args[0], val, ctx), "*") *
           as_int(eval_rec(args[1], val, ctx), "*");
  case Op::Neg:
    return -as_int(eval_rec(args[0], val, ctx), "-");
  case Op::Le:
    return as_int(eval_rec(args[0], val, ctx), "<=") <=
           as_int(eval_rec(args[1], val, ctx), "<=");
  case Op::Lt:
    return as_int(eval_rec(args[0], val, ctx), "<") <
           as_int(eval_rec(args[1], val, ctx), "<");
  case Op::Ge:
    return as_int(eval_rec(args[0], val, ctx), ">=") >=
           as_int(eval_rec(args[1], val, ctx), ">=");
  case Op::Gt:
    return as_int(eval_rec(args[0], val, ctx), ">") >
           as_int(eval_rec(args[1], val, ctx), ">");
  case Op::Eq:
  case Op::Neq: {
    Value a = eval_rec(args[0], val, ctx);
    Value b = eval_rec(args[1], val, ctx);
    bool eq;
    if (std::holds_alternative<std::int64_t>(a)) {
      eq = as_int(a, "=") == as_int(b, "=");
    } else if (std::holds_alternative<ArrayValue>(a)) {
      // array equality over the finite model: agree on [0, array_len)
      const auto &x = std::get<ArrayValue>(a);
      const auto &y = std::get<ArrayValue>(b);
      eq = true;
      for (std::int64_t i = 0; i < ctx.array_len; ++i)
        if (x.get(i) != y.get(i)) {
          eq = false;
          break;
        }
    } else {
      eq = as_bool(a, "=") == as_bool(b, "=");
    }
    return e.op() == Op::Eq ? eq : !eq;
  }
  case Op::And: {
    for (const auto &a : args)
      if (!as_bool(eval_rec(a, val, ctx), "and"))
        return false;
    return true;
  }
  case Op::Or: {
    for (const auto &a : args)
      if (as_bool(eval_rec(a, val, ctx), "or"))
        return true;
    return false;
  }
  case Op::Not:
    return !as_bool(eval_rec(args[0], val, ctx), "not");
  case Op::Implies:
    return !as_bool(eval_rec(args[0], val, ctx), "=>") ||
           as_bool(eval_rec(args[1], val, ctx), "=>");
  case Op::Ite:
    return as_bool(eval_rec(args[0], val, ctx), "ite")
               ? eval_rec(args[1], val, ctx)
               : eval_rec(args[2], val, ctx);
  }
  throw EvalError("unhandled operator");
}

// Replaces applications of unbound synthesized functions by fresh opaque
// variables, one per structurally distinct application.
Expr atomize(const Expr &e, const Bindings *bindings,
             std::unordered_map<Expr, std::string, ExprHash> &atoms,
             int &next_id) {
  switch (e.kind()) {
  case Kind::SynthApp: {
    if (bindings && bindings->count(e.name()))
      break;
    auto it = atoms.find(e);
    if (it != atoms.end())
      return mk_var(it->second, e.sort());
    std::string name = "#" + std::to_string(next_id++);
    atoms.emplace(e, name);
    return mk_var(name, e.sort());
  }
  default:
    break;
  }
  if (e.args().empty())
    return e;
  std::vector<Expr> args;
  args.reserve(e.args().size());
  bool changed = false;
  for (const auto &a : e.args()) {
    args.push_back(atomize(a, bindings, atoms, next_id));
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

// One mutable cell of the enumeration odometer.
struct Digit {
  enum Kind { Int, Bool, ArrayElem } kind;
  std::string var;
  std::int64_t index = 0; // for ArrayElem
};

} // namespace

Value evaluate(const Expr &e, const Valuation &val, const EvalContext &ctx) {
  Valuation copy = val;
  return eval_rec(e, copy, ctx);
}

bool evaluate_bool(const Expr &e, const Valuation &val,
                   const EvalContext &ctx) {
  return as_bool(evaluate(e, val, ctx), "formula");
}

FiniteCheckResult finite_check(const Expr &e, const FiniteCheckConfig &cfg) {
  std::unordered_map<Expr, std::string, ExprHash> atoms;
  int next_id = 0;
  Expr body = atomize(e, cfg.bindings, atoms, next_id);

  auto vars = free_variables(body);
  std::vector<Digit> digits;
  Valuation val;
  const std::int64_t W = cfg.value_max - cfg.value_min + 1;
  if (W <= 0)
    throw OracleTooLarge("empty value window");
  double total = 1;
  for (const auto &[name, sort] : vars) {
    switch (sort) {
    case Sort::Int:
      digits.push_back({Digit::Int, name, 0});
      val[name] = cfg.value_min;
      total *= static_cast<double>(W);
      break;
    case Sort::Bool:
      digits.push_back({Digit::Bool, name, 0});
      val[name] = false;
      total *= 2;
      break;
    case Sort::IntArray: {
      ArrayValue a;
      for (std::int64_t i = 0; i < cfg.array_len; i++) {
        a.entries[i] = cfg.value_min;
        digits.push_back({Digit::ArrayElem, name, i});
        total *= static_cast<double>(W);
      }
      val[name] = std::move(a);
      break;
    }
    }
    if (total > static_cast<double>(cfg.max_valuations))
      throw OracleTooLarge("search space of " + std::to_string(total) +
                           " valuations exceeds the configured ceiling");
  }

  EvalContext ctx;
  ctx.array_len = cfg.array_len;
  ctx.bindings = cfg.bindings;

  FiniteCheckResult res;
  for (;;) {
    res.valuations_tried++;
    Valuation copy = val;
    if (as_bool(eval_rec(body, copy, ctx), "finite_check formula")) {
      res.witness = val;
      return res;
    }
    // advance the odometer
    std::size_t i = 0;
    for (; i < digits.size(); i++) {
      Digit &d = digits[i];
      if (d.kind == Digit::Bool) {
        bool &b = std::get<bool>(val[d.var]);
        if (!b) {
          b = true;
          break;
        }
        b = false;
      } else {
        std::int64_t *cell;
        if (d.kind == Digit::Int)
          cell = &std::get<std::int64_t>(val[d.var]);
        else
          cell = &std::get<ArrayValue>(val[d.var]).entries[d.index];
        if (*cell < cfg.value_max) {
          (*cell)++;
          break;
        }
        *cell = cfg.value_min;
      }
    }
    if (i == digits.size())
      return res; // wrapped around: exhausted
  }
}

bool equivalent_on_window(const Expr &a, const Expr &b,
                          const FiniteCheckConfig &cfg) {
  Expr differs = mk_not(mk_apply(Op::Eq, {a, b}));
  return !finite_check(differs, cfg).sat();
}

std::optional<std::int64_t> max_constant_index(const Expr &e) {
  std::optional<std::int64_t> best;
  auto consider = [&best](const Expr &idx) {
    if (idx.kind() == Kind::IntConst)
      if (!best || idx.int_value() > *best)
        best = idx.int_value();
  };
  std::function<void(const Expr &)> walk = [&](const Expr &x) {
    if (x.kind() == Kind::Select)
      consider(x.args()[1]);
    if (x.kind() == Kind::Store)
      consider(x.args()[1]);
    for (const auto &a : x.args())
      walk(a);
  };
  walk(e);
  return best;
}

Valuation valuation_from_model(const Model &m) {
  Valuation val;
  for (const auto &[name, mv] : m) {
    if (const auto *i = std::get_if<std::int64_t>(&mv))
      val[name] = *i;
    else if (const auto *b = std::get_if<bool>(&mv))
      val[name] = *b;
    else {
      const ArrayModel &am = std::get<ArrayModel>(mv);
      ArrayValue a;
      a.entries = am.entries;
      a.def = am.def;
      val[name] = std::move(a);
    }
  }
  return val;
}

} // namespace synrg
