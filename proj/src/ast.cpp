#include "synrg/ast.h"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>

namespace synrg {

std::string to_string(Sort s) {
  switch (s) {
  case Sort::Int:
    return "Int";
  case Sort::Bool:
    return "Bool";
  case Sort::IntArray:
    return "(Array Int Int)";
  }
  return "?";
}

namespace {

std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t compute_hash(const detail::Node &n) {
  std::size_t h = static_cast<std::size_t>(n.kind);
  h = hash_combine(h, static_cast<std::size_t>(n.sort));
  h = hash_combine(h, static_cast<std::size_t>(n.op));
  h = hash_combine(h, static_cast<std::size_t>(n.quant));
  h = hash_combine(h, std::hash<std::int64_t>{}(n.ival));
  h = hash_combine(h, n.bval ? 1 : 0);
  h = hash_combine(h, std::hash<std::string>{}(n.name));
  for (const auto &a : n.args)
    h = hash_combine(h, a.hash());
  for (const auto &b : n.binders) {
    h = hash_combine(h, std::hash<std::string>{}(b.first));
    h = hash_combine(h, static_cast<std::size_t>(b.second));
  }
  return h;
}

} // namespace

Expr Expr::make(detail::Node node) {
  node.hash = compute_hash(node);
  Expr e;
  struct Access : Expr {
    static Expr wrap(std::shared_ptr<const detail::Node> n) {
      Access a;
      a.set(std::move(n));
      return a;
    }
    void set(std::shared_ptr<const detail::Node> n) { node_ = std::move(n); }
  };
  return Access::wrap(std::make_shared<detail::Node>(std::move(node)));
}

bool Expr::operator==(const Expr &other) const {
  if (node_ == other.node_)
    return true;
  if (!node_ || !other.node_)
    return false;
  const detail::Node &a = *node_;
  const detail::Node &b = *other.node_;
  if (a.hash != b.hash || a.kind != b.kind || a.sort != b.sort)
    return false;
  switch (a.kind) {
  case Kind::IntConst:
    return a.ival == b.ival;
  case Kind::BoolConst:
    return a.bval == b.bval;
  case Kind::Var:
    return a.name == b.name;
  case Kind::Apply:
    if (a.op != b.op)
      return false;
    break;
  case Kind::Quant:
    if (a.quant != b.quant || a.binders != b.binders)
      return false;
    break;
  case Kind::SynthApp:
    if (a.name != b.name)
      return false;
    break;
  default:
    break;
  }
  if (a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); i++)
    if (!(a.args[i] == b.args[i]))
      return false;
  return true;
}

Expr mk_int(std::int64_t v) {
  detail::Node n;
  n.kind = Kind::IntConst;
  n.sort = Sort::Int;
  n.ival = v;
  return Expr::make(std::move(n));
}

Expr mk_bool(bool v) {
  detail::Node n;
  n.kind = Kind::BoolConst;
  n.sort = Sort::Bool;
  n.bval = v;
  return Expr::make(std::move(n));
}

Expr mk_var(const std::string &name, Sort sort) {
  detail::Node n;
  n.kind = Kind::Var;
  n.sort = sort;
  n.name = name;
  return Expr::make(std::move(n));
}

namespace {

void require(bool cond, const std::string &msg) {
  if (!cond)
    throw SortError(msg);
}

void require_sort(const Expr &e, Sort s, const char *what) {
  if (e.sort() != s)
    throw SortError(std::string(what) + ": expected " + to_string(s) +
                    ", got " + to_string(e.sort()));
}

} // namespace

Expr mk_apply(Op op, std::vector<Expr> args) {
  detail::Node n;
  n.kind = Kind::Apply;
  n.op = op;
  switch (op) {
  case Op::Add:
    require(args.size() >= 2, "+ needs at least two operands");
    for (auto &a : args)
      require_sort(a, Sort::Int, "+");
    n.sort = Sort::Int;
    break;
  case Op::Sub:
    require(args.size() == 2, "- needs two operands");
    for (auto &a : args)
      require_sort(a, Sort::Int, "-");
    n.sort = Sort::Int;
    break;
  case Op::MulConst:
    require(args.size() == 2, "* needs two operands");
    for (auto &a : args)
      require_sort(a, Sort::Int, "*");
    // keep the constant first; reject non-linear products
    if (args[0].kind() != Kind::IntConst && args[1].kind() == Kind::IntConst)
      std::swap(args[0], args[1]);
    require(args[0].kind() == Kind::IntConst,
            "* requires a constant operand (linear arithmetic only)");
    break;
  case Op::Neg:
    require(args.size() == 1, "unary - needs one operand");
    require_sort(args[0], Sort::Int, "unary -");
    if (args[0].kind() == Kind::IntConst)
      return mk_int(-args[0].int_value());
    n.sort = Sort::Int;
    break;
  case Op::Le:
  case Op::Lt:
  case Op::Ge:
  case Op::Gt:
    require(args.size() == 2, "comparison needs two operands");
    for (auto &a : args)
      require_sort(a, Sort::Int, "comparison");
    n.sort = Sort::Bool;
    break;
  case Op::Eq:
  case Op::Neq:
    require(args.size() == 2, "equality needs two operands");
    require(args[0].sort() == args[1].sort(), "equality over mixed sorts");
    n.sort = Sort::Bool;
    break;
  case Op::And:
  case Op::Or:
    require(args.size() >= 2, "and/or need at least two operands");
    for (auto &a : args)
      require_sort(a, Sort::Bool, "and/or");
    n.sort = Sort::Bool;
    break;
  case Op::Not:
    require(args.size() == 1, "not needs one operand");
    require_sort(args[0], Sort::Bool, "not");
    n.sort = Sort::Bool;
    break;
  case Op::Implies:
    require(args.size() == 2, "=> needs two operands");
    for (auto &a : args)
      require_sort(a, Sort::Bool, "=>");
    n.sort = Sort::Bool;
    break;
  case Op::Ite:
    require(args.size() == 3, "ite needs three operands");
    require_sort(args[0], Sort::Bool, "ite condition");
    require(args[1].sort() == args[2].sort(), "ite branches of mixed sorts");
    n.sort = args[1].sort();
    break;
  }
  if (op == Op::MulConst)
    n.sort = Sort::Int;
  n.args = std::move(args);
  return Expr::make(std::move(n));
}

Expr mk_select(const Expr &array, const Expr &index) {
  require_sort(array, Sort::IntArray, "select");
  require_sort(index, Sort::Int, "select index");
  detail::Node n;
  n.kind = Kind::Select;
  n.sort = Sort::Int;
  n.args = {array, index};
  return Expr::make(std::move(n));
}

Expr mk_store(const Expr &array, const Expr &index, const Expr &value) {
  require_sort(array, Sort::IntArray, "store");
  require_sort(index, Sort::Int, "store index");
  require_sort(value, Sort::Int, "store value");
  detail::Node n;
  n.kind = Kind::Store;
  n.sort = Sort::IntArray;
  n.args = {array, index, value};
  return Expr::make(std::move(n));
}

Expr mk_quant(QuantKind kind, std::vector<Binder> binders, const Expr &body) {
  require(!binders.empty(), "quantifier needs at least one binder");
  for (const auto &b : binders)
    require(b.second == Sort::Int, "quantified variables must have sort Int");
  require_sort(body, Sort::Bool, "quantifier body");
  detail::Node n;
  n.kind = Kind::Quant;
  n.sort = Sort::Bool;
  n.quant = kind;
  n.binders = std::move(binders);
  n.args = {body};
  return Expr::make(std::move(n));
}

Expr mk_synth_app(const std::string &fun, std::vector<Expr> args,
                  Sort return_sort) {
  detail::Node n;
  n.kind = Kind::SynthApp;
  n.sort = return_sort;
  n.name = fun;
  n.args = std::move(args);
  return Expr::make(std::move(n));
}

Expr mk_and(std::vector<Expr> conjuncts) {
  if (conjuncts.empty())
    return mk_bool(true);
  if (conjuncts.size() == 1)
    return conjuncts[0];
  return mk_apply(Op::And, std::move(conjuncts));
}

Expr mk_or(std::vector<Expr> disjuncts) {
  if (disjuncts.empty())
    return mk_bool(false);
  if (disjuncts.size() == 1)
    return disjuncts[0];
  return mk_apply(Op::Or, std::move(disjuncts));
}

Expr mk_not(const Expr &e) {
  if (e.kind() == Kind::BoolConst)
    return mk_bool(!e.bool_value());
  if (e.kind() == Kind::Apply && e.op() == Op::Not)
    return e.args()[0];
  return mk_apply(Op::Not, {e});
}

Expr mk_implies(const Expr &a, const Expr &b) {
  return mk_apply(Op::Implies, {a, b});
}

namespace {

void free_vars_rec(const Expr &e, std::set<std::string> &bound,
                   std::map<std::string, Sort> &out) {
  switch (e.kind()) {
  case Kind::Var:
    if (!bound.count(e.name()))
      out.emplace(e.name(), e.sort());
    return;
  case Kind::Quant: {
    std::vector<std::string> shadowed;
    for (const auto &b : e.binders())
      if (bound.insert(b.first).second)
        shadowed.push_back(b.first);
    free_vars_rec(e.body(), bound, out);
    for (const auto &s : shadowed)
      bound.erase(s);
    return;
  }
  default:
    for (const auto &a : e.args())
      free_vars_rec(a, bound, out);
    return;
  }
}

} // namespace

std::map<std::string, Sort> free_variables(const Expr &e) {
  std::map<std::string, Sort> out;
  std::set<std::string> bound;
  free_vars_rec(e, bound, out);
  return out;
}

namespace {

Expr rebuild(const Expr &e, std::vector<Expr> args) {
  // Rebuild a node of the same shape with new children; reuses the original
  // when nothing changed.
  bool same = args.size() == e.args().size();
  if (same)
    for (std::size_t i = 0; i < args.size(); i++)
      if (!args[i].same_node(e.args()[i])) {
        same = false;
        break;
      }
  if (same)
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

Expr subst_rec(const Expr &e, const std::string &var, const Expr &term,
               const std::map<std::string, Sort> &term_free) {
  switch (e.kind()) {
  case Kind::IntConst:
  case Kind::BoolConst:
    return e;
  case Kind::Var:
    if (e.name() == var) {
      if (e.sort() != term.sort())
        throw SortError("substitute: replacing " + var + " of sort " +
                        to_string(e.sort()) + " with a term of sort " +
                        to_string(term.sort()));
      return term;
    }
    return e;
  case Kind::Quant: {
    for (const auto &b : e.binders())
      if (b.first == var)
        return e; // var is shadowed below this point
    // Rename binders that would capture free variables of term.
    std::vector<Binder> binders = e.binders();
    Expr body = e.body();
    bool renamed = false;
    for (auto &b : binders) {
      if (!term_free.count(b.first))
        continue;
      std::map<std::string, Sort> body_free = free_variables(body);
      std::string base = b.first;
      int k = 1;
      std::string candidate;
      do {
        candidate = base + "!" + std::to_string(k++);
      } while (term_free.count(candidate) || body_free.count(candidate));
      body = substitute(body, b.first, mk_var(candidate, b.second));
      b.first = candidate;
      renamed = true;
    }
    Expr new_body = subst_rec(body, var, term, term_free);
    if (!renamed && new_body.same_node(e.body()))
      return e;
    return mk_quant(e.quant_kind(), std::move(binders), new_body);
  }
  default: {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const auto &a : e.args())
      args.push_back(subst_rec(a, var, term, term_free));
    return rebuild(e, std::move(args));
  }
  }
}

} // namespace

Expr substitute(const Expr &e, const std::string &var, const Expr &term) {
  return subst_rec(e, var, term, free_variables(term));
}

namespace {

bool is_int_const(const Expr &e, std::int64_t v) {
  return e.kind() == Kind::IntConst && e.int_value() == v;
}

Expr simplify_apply(Op op, const std::vector<Expr> &args) {
  auto all_int_const = [&]() {
    for (const auto &a : args)
      if (a.kind() != Kind::IntConst)
        return false;
    return true;
  };
  switch (op) {
  case Op::Add: {
    std::int64_t c = 0;
    std::vector<Expr> rest;
    for (const auto &a : args) {
      if (a.kind() == Kind::IntConst)
        c += a.int_value();
      else
        rest.push_back(a);
    }
    if (rest.empty())
      return mk_int(c);
    if (c != 0)
      rest.push_back(mk_int(c));
    if (rest.size() == 1)
      return rest[0];
    return mk_apply(Op::Add, std::move(rest));
  }
  case Op::Sub:
    if (all_int_const())
      return mk_int(args[0].int_value() - args[1].int_value());
    if (is_int_const(args[1], 0))
      return args[0];
    return mk_apply(op, args);
  case Op::MulConst: {
    std::int64_t c = args[0].int_value();
    if (args[1].kind() == Kind::IntConst)
      return mk_int(c * args[1].int_value());
    if (c == 0)
      return mk_int(0);
    if (c == 1)
      return args[1];
    return mk_apply(op, args);
  }
  case Op::Neg:
    if (args[0].kind() == Kind::Apply && args[0].op() == Op::Neg)
      return args[0].args()[0];
    return mk_apply(op, args);
  case Op::Le:
  case Op::Lt:
  case Op::Ge:
  case Op::Gt: {
    if (all_int_const()) {
      std::int64_t a = args[0].int_value(), b = args[1].int_value();
      switch (op) {
      case Op::Le:
        return mk_bool(a <= b);
      case Op::Lt:
        return mk_bool(a < b);
      case Op::Ge:
        return mk_bool(a >= b);
      default:
        return mk_bool(a > b);
      }
    }
    if (args[0] == args[1])
      return mk_bool(op == Op::Le || op == Op::Ge);
    return mk_apply(op, args);
  }
  case Op::Eq:
  case Op::Neq: {
    if (args[0].kind() == Kind::IntConst && args[1].kind() == Kind::IntConst)
      return mk_bool((args[0].int_value() == args[1].int_value()) ==
                     (op == Op::Eq));
    if (args[0].kind() == Kind::BoolConst && args[1].kind() == Kind::BoolConst)
      return mk_bool((args[0].bool_value() == args[1].bool_value()) ==
                     (op == Op::Eq));
    if (args[0] == args[1])
      return mk_bool(op == Op::Eq);
    return mk_apply(op, args);
  }
  case Op::And:
  case Op::Or: {
    bool absorbing = (op == Op::Or);
    std::vector<Expr> rest;
    for (const auto &a : args) {
      if (a.kind() == Kind::BoolConst) {
        if (a.bool_value() == absorbing)
          return mk_bool(absorbing);
        continue; // identity element, drop
      }
      rest.push_back(a);
    }
    if (rest.empty())
      return mk_bool(!absorbing);
    if (rest.size() == 1)
      return rest[0];
    return mk_apply(op, std::move(rest));
  }
  case Op::Not:
    return mk_not(args[0]);
  case Op::Implies:
    if (args[0].kind() == Kind::BoolConst)
      return args[0].bool_value() ? args[1] : mk_bool(true);
    if (args[1].kind() == Kind::BoolConst)
      return args[1].bool_value() ? mk_bool(true) : mk_not(args[0]);
    return mk_apply(op, args);
  case Op::Ite:
    if (args[0].kind() == Kind::BoolConst)
      return args[0].bool_value() ? args[1] : args[2];
    return mk_apply(op, args);
  }
  return mk_apply(op, args);
}

} // namespace

Expr simplify(const Expr &e) {
  switch (e.kind()) {
  case Kind::IntConst:
  case Kind::BoolConst:
  case Kind::Var:
    return e;
  case Kind::Quant: {
    Expr body = simplify(e.body());
    if (body.kind() == Kind::BoolConst)
      return body; // the integer domain is non-empty
    if (body.same_node(e.body()))
      return e;
    return mk_quant(e.quant_kind(), e.binders(), body);
  }
  case Kind::Apply: {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto &a : e.args()) {
      args.push_back(simplify(a));
      changed = changed || !args.back().same_node(a);
    }
    Expr out = simplify_apply(e.op(), args);
    if (!changed && out.kind() == Kind::Apply && out.op() == e.op() &&
        out.args().size() == e.args().size()) {
      bool same = true;
      for (std::size_t i = 0; i < args.size(); i++)
        if (!out.args()[i].same_node(e.args()[i])) {
          same = false;
          break;
        }
      if (same)
        return e;
    }
    return out;
  }
  default: {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const auto &a : e.args())
      args.push_back(simplify(a));
    return rebuild(e, std::move(args));
  }
  }
}

void collect_symbols(const Expr &e, std::map<std::string, int> &out) {
  switch (e.kind()) {
  case Kind::Var:
    out[e.name()]++;
    return;
  case Kind::SynthApp:
    out[e.name()]++;
    break;
  case Kind::Quant:
    for (const auto &b : e.binders())
      out[b.first]++;
    break;
  default:
    break;
  }
  for (const auto &a : e.args())
    collect_symbols(a, out);
}

std::string FreshVarGen::fresh() { return "z" + std::to_string(next_++); }

std::string FreshVarGen::fresh_avoiding(const std::map<std::string, int> &avoid) {
  std::string name = fresh();
  while (avoid.count(name))
    name = fresh();
  return name;
}

bool is_reserved_symbol(const std::string &name) {
  if (name.size() < 2 || name[0] != 'z')
    return false;
  for (std::size_t i = 1; i < name.size(); i++)
    if (!std::isdigit(static_cast<unsigned char>(name[i])))
      return false;
  return true;
}

} // namespace synrg
