// Immutable expression trees for an integer/boolean/array term language with
// bounded quantifiers over Int, plus applications of to-be-synthesized
// functions.  Expressions share subtrees via shared_ptr and compare
// structurally.
#ifndef SYNRG_AST_H
#define SYNRG_AST_H

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synrg/errors.h"

namespace synrg {

enum class Sort { Int, Bool, IntArray };

std::string to_string(Sort s);

enum class Kind {
  IntConst,
  BoolConst,
  Var,
  Apply,
  Select,
  Store,
  Quant,
  SynthApp
};

enum class Op {
  Add,
  Sub,
  MulConst,
  Neg,
  Le,
  Lt,
  Ge,
  Gt,
  Eq,
  Neq,
  And,
  Or,
  Not,
  Implies,
  Ite
};

enum class QuantKind { Forall, Exists };

class Expr;

using Binder = std::pair<std::string, Sort>;

namespace detail {
struct Node {
  Kind kind;
  Sort sort = Sort::Bool;
  Op op = Op::And;
  QuantKind quant = QuantKind::Forall;
  std::int64_t ival = 0;
  bool bval = false;
  std::string name;
  std::vector<Expr> args;
  std::vector<Binder> binders;
  std::size_t hash = 0;
};
} // namespace detail

class Expr {
public:
  Expr() = default;

  Kind kind() const { return node_->kind; }
  Sort sort() const { return node_->sort; }
  Op op() const { return node_->op; }
  QuantKind quant_kind() const { return node_->quant; }
  std::int64_t int_value() const { return node_->ival; }
  bool bool_value() const { return node_->bval; }
  const std::string &name() const { return node_->name; }
  const std::vector<Expr> &args() const { return node_->args; }
  const std::vector<Binder> &binders() const { return node_->binders; }
  // Body of a quantifier (single child of a Quant node).
  const Expr &body() const { return node_->args.front(); }

  bool is_null() const { return node_ == nullptr; }
  std::size_t hash() const { return node_->hash; }

  bool operator==(const Expr &other) const;
  bool operator!=(const Expr &other) const { return !(*this == other); }
  bool same_node(const Expr &other) const { return node_ == other.node_; }

  static Expr make(detail::Node node);

private:
  std::shared_ptr<const detail::Node> node_;
};

struct ExprHash {
  std::size_t operator()(const Expr &e) const { return e.hash(); }
};

// --- constructors ---------------------------------------------------------

Expr mk_int(std::int64_t v);
Expr mk_bool(bool v);
Expr mk_var(const std::string &name, Sort sort);
// Sort-checks the application; throws SortError on arity or sort mismatch
// (including a MulConst whose operands are both non-constant).
Expr mk_apply(Op op, std::vector<Expr> args);
Expr mk_select(const Expr &array, const Expr &index);
Expr mk_store(const Expr &array, const Expr &index, const Expr &value);
Expr mk_quant(QuantKind kind, std::vector<Binder> binders, const Expr &body);
Expr mk_synth_app(const std::string &fun, std::vector<Expr> args,
                  Sort return_sort);

// Convenience builders.
inline Expr mk_forall(std::vector<Binder> b, const Expr &body) {
  return mk_quant(QuantKind::Forall, std::move(b), body);
}
inline Expr mk_exists(std::vector<Binder> b, const Expr &body) {
  return mk_quant(QuantKind::Exists, std::move(b), body);
}
Expr mk_and(std::vector<Expr> conjuncts);  // empty -> true, single -> itself
Expr mk_or(std::vector<Expr> disjuncts);   // empty -> false, single -> itself
Expr mk_not(const Expr &e);                // folds constants, double negation
Expr mk_implies(const Expr &a, const Expr &b);

// --- operations -----------------------------------------------------------

// Free variables with their sorts, keyed by name (deterministic order).
std::map<std::string, Sort> free_variables(const Expr &e);

// Capture-avoiding substitution of every free occurrence of `var` by `term`.
// Throws SortError when an occurrence's sort differs from term's sort.
Expr substitute(const Expr &e, const std::string &var, const Expr &term);

// Light normalization: constant folding (arithmetic, comparisons, also
// comparisons with structurally identical operands), and/or/implies identity
// elimination with constant operands, double-negation removal, ite with a
// constant condition, quantifiers with constant bodies.  Deterministic and
// idempotent; never changes the meaning of the expression.
Expr simplify(const Expr &e);

// Every symbol occurring anywhere in e (free, bound, arrays, synth funs).
void collect_symbols(const Expr &e, std::map<std::string, int> &out);

// Generator for fresh variable names z<N>.  Parsed input may not declare
// symbols of this shape, so generated names never collide with user symbols;
// fresh() additionally skips names present in `avoid`.
class FreshVarGen {
public:
  explicit FreshVarGen(int start = 0) : next_(start) {}
  std::string fresh();
  std::string fresh_avoiding(const std::map<std::string, int> &avoid);
  int next_index() const { return next_; }

private:
  int next_;
};

// True when `name` matches the reserved fresh-variable shape z<digits...>.
bool is_reserved_symbol(const std::string &name);

} // namespace synrg

#endif
