#include "synrg/sygus_io.h"

#include <cctype>
#include <functional>
#include <optional>
#include <sstream>

namespace synrg {

namespace {

// --- lexing ---------------------------------------------------------------

struct Token {
  enum Kind { LParen, RParen, Symbol, Numeral, End } kind = End;
  std::string text;
  int line = 1;
  int col = 1;
};

bool is_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c)))
    return true;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  return extra.find(c) != std::string::npos;
}

class Lexer {
public:
  explicit Lexer(const std::string &text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) {
      t.kind = Token::End;
      return t;
    }
    char c = text_[pos_];
    if (c == '(') {
      advance();
      t.kind = Token::LParen;
      return t;
    }
    if (c == ')') {
      advance();
      t.kind = Token::RParen;
      return t;
    }
    if (c == '|') { // quoted symbol (accepted for solver output robustness)
      advance();
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '|') {
        s.push_back(text_[pos_]);
        advance();
      }
      if (pos_ >= text_.size())
        throw ParseError(t.line, t.col, "unterminated quoted symbol");
      advance();
      t.kind = Token::Symbol;
      t.text = s;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string s;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        s.push_back(text_[pos_]);
        advance();
      }
      t.kind = Token::Numeral;
      t.text = s;
      return t;
    }
    if (is_symbol_char(c)) {
      std::string s;
      while (pos_ < text_.size() && is_symbol_char(text_[pos_])) {
        s.push_back(text_[pos_]);
        advance();
      }
      t.kind = Token::Symbol;
      t.text = s;
      return t;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c +
                                      "'");
  }

private:
  void advance() {
    if (text_[pos_] == '\n') {
      line_++;
      col_ = 1;
    } else {
      col_++;
    }
    pos_++;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') { // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string &text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// --- s-expressions --------------------------------------------------------

struct SExpr {
  bool is_atom = false;
  bool is_numeral = false;
  std::string text;
  std::vector<SExpr> items;
  int line = 1;
  int col = 1;

  bool is_list() const { return !is_atom; }
  bool atom_is(const char *s) const { return is_atom && text == s; }
};

SExpr read_sexpr_from(Lexer &lex, Token tok);

SExpr read_sexpr_list(Lexer &lex, Token open) {
  SExpr e;
  e.line = open.line;
  e.col = open.col;
  for (;;) {
    Token inner = lex.next();
    if (inner.kind == Token::RParen)
      return e;
    if (inner.kind == Token::End)
      throw ParseError(open.line, open.col, "unbalanced '('");
    e.items.push_back(read_sexpr_from(lex, inner));
  }
}

SExpr read_sexpr_from(Lexer &lex, Token tok) {
  SExpr e;
  e.line = tok.line;
  e.col = tok.col;
  switch (tok.kind) {
  case Token::Symbol:
    e.is_atom = true;
    e.text = tok.text;
    return e;
  case Token::Numeral:
    e.is_atom = true;
    e.is_numeral = true;
    e.text = tok.text;
    return e;
  case Token::LParen:
    return read_sexpr_list(lex, tok);
  case Token::RParen:
    throw ParseError(tok.line, tok.col, "unexpected ')'");
  default:
    throw ParseError(tok.line, tok.col, "unexpected end of input");
  }
}

std::optional<SExpr> next_sexpr(Lexer &lex) {
  Token t = lex.next();
  if (t.kind == Token::End)
    return std::nullopt;
  return read_sexpr_from(lex, t);
}

[[noreturn]] void fail(const SExpr &at, const std::string &msg) {
  throw ParseError(at.line, at.col, msg);
}

Sort parse_sort(const SExpr &e) {
  if (e.is_atom) {
    if (e.text == "Int")
      return Sort::Int;
    if (e.text == "Bool")
      return Sort::Bool;
    fail(e, "unknown sort '" + e.text + "'");
  }
  if (e.items.size() == 3 && e.items[0].atom_is("Array") &&
      e.items[1].atom_is("Int") && e.items[2].atom_is("Int"))
    return Sort::IntArray;
  fail(e, "unsupported sort (only Int, Bool and (Array Int Int))");
}

void check_declared_name(const SExpr &at, const std::string &name) {
  if (is_reserved_symbol(name))
    fail(at, "symbol '" + name +
                 "' uses the reserved fresh-variable prefix z<digits>");
}

// --- term parsing ---------------------------------------------------------

class TermParser {
public:
  TermParser(const Problem &p, bool quantifiers_allowed = true)
      : prob_(p), quantifiers_allowed_(quantifiers_allowed) {}

  void push_scope(const std::vector<std::pair<std::string, Sort>> &vars) {
    scopes_.emplace_back(vars.begin(), vars.end());
  }
  void pop_scope() { scopes_.pop_back(); }
  // When set, symbols naming grammar nonterminals parse as placeholder vars
  // and problem-level declared variables go out of scope.
  void set_grammar_context(const Grammar *g) { grammar_ = g; }

  Expr parse(const SExpr &e) {
    if (e.is_atom)
      return parse_atom(e);
    if (e.items.empty())
      fail(e, "empty application");
    const SExpr &head = e.items[0];
    if (!head.is_atom)
      fail(head, "expected an operator or function symbol");
    try {
      return parse_application(e, head.text);
    } catch (const SortError &err) {
      fail(e, err.what());
    }
  }

private:
  Expr parse_atom(const SExpr &e) {
    if (e.is_numeral)
      return mk_int(std::stoll(e.text));
    if (e.text == "true")
      return mk_bool(true);
    if (e.text == "false")
      return mk_bool(false);
    if (auto s = lookup_scope(e.text))
      return mk_var(e.text, *s);
    if (grammar_ && grammar_->is_nonterminal(e.text)) {
      for (std::size_t i = 0; i < grammar_->nonterminals.size(); i++)
        if (grammar_->nonterminals[i].first == e.text)
          return mk_var(e.text, grammar_->nonterminals[i].second);
    }
    if (!grammar_) {
      if (auto s = prob_.var_sort(e.text))
        return mk_var(e.text, *s);
    }
    if (const SynthFun *f = prob_.find_fun(e.text)) {
      if (!f->params.empty())
        fail(e, "function '" + e.text + "' expects " +
                    std::to_string(f->params.size()) + " arguments");
      return mk_synth_app(f->name, {}, f->return_sort);
    }
    fail(e, "unknown symbol '" + e.text + "'");
  }

  std::optional<Sort> lookup_scope(const std::string &name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end())
        return found->second;
    }
    return std::nullopt;
  }

  std::vector<Expr> parse_args(const SExpr &e) {
    std::vector<Expr> args;
    for (std::size_t i = 1; i < e.items.size(); i++)
      args.push_back(parse(e.items[i]));
    return args;
  }

  Expr parse_application(const SExpr &e, const std::string &head) {
    if (head == "forall" || head == "exists")
      return parse_quant(e, head == "forall" ? QuantKind::Forall
                                             : QuantKind::Exists);
    if (head == "select") {
      auto args = parse_args(e);
      if (args.size() != 2)
        fail(e, "select needs two arguments");
      return mk_select(args[0], args[1]);
    }
    if (head == "store") {
      auto args = parse_args(e);
      if (args.size() != 3)
        fail(e, "store needs three arguments");
      return mk_store(args[0], args[1], args[2]);
    }
    if (head == "+") {
      auto args = parse_args(e);
      if (args.size() < 2)
        fail(e, "+ needs at least two arguments");
      return mk_apply(Op::Add, std::move(args));
    }
    if (head == "-") {
      auto args = parse_args(e);
      if (args.size() == 1)
        return mk_apply(Op::Neg, std::move(args));
      if (args.empty())
        fail(e, "- needs arguments");
      Expr acc = args[0];
      for (std::size_t i = 1; i < args.size(); i++)
        acc = mk_apply(Op::Sub, {acc, args[i]});
      return acc;
    }
    if (head == "*")
      return parse_product(e);
    static const std::map<std::string, Op> binary = {
        {"<=", Op::Le}, {"<", Op::Lt}, {">=", Op::Ge},
        {">", Op::Gt},  {"=", Op::Eq}};
    auto bin = binary.find(head);
    if (bin != binary.end()) {
      auto args = parse_args(e);
      if (args.size() != 2)
        fail(e, head + " needs two arguments");
      return mk_apply(bin->second, std::move(args));
    }
    if (head == "and" || head == "or") {
      auto args = parse_args(e);
      if (args.size() < 2)
        fail(e, head + " needs at least two arguments");
      return mk_apply(head == "and" ? Op::And : Op::Or, std::move(args));
    }
    if (head == "not") {
      auto args = parse_args(e);
      if (args.size() != 1)
        fail(e, "not needs one argument");
      return mk_apply(Op::Not, std::move(args));
    }
    if (head == "=>") {
      auto args = parse_args(e);
      if (args.size() < 2)
        fail(e, "=> needs at least two arguments");
      Expr acc = args.back();
      for (std::size_t i = args.size() - 1; i-- > 0;)
        acc = mk_apply(Op::Implies, {args[i], acc});
      return acc;
    }
    if (head == "ite") {
      auto args = parse_args(e);
      if (args.size() != 3)
        fail(e, "ite needs three arguments");
      return mk_apply(Op::Ite, std::move(args));
    }
    if (const SynthFun *f = prob_.find_fun(head)) {
      auto args = parse_args(e);
      if (args.size() != f->params.size())
        fail(e, "function '" + head + "' expects " +
                    std::to_string(f->params.size()) + " arguments");
      for (std::size_t i = 0; i < args.size(); i++)
        if (args[i].sort() != f->params[i].second)
          fail(e.items[i + 1], "argument " + std::to_string(i + 1) + " of '" +
                                   head + "' has sort " +
                                   to_string(args[i].sort()) + ", expected " +
                                   to_string(f->params[i].second));
      return mk_synth_app(f->name, std::move(args), f->return_sort);
    }
    fail(e, "unknown operator or function '" + head + "'");
  }

  Expr parse_product(const SExpr &e) {
    auto args = parse_args(e);
    if (args.size() < 2)
      fail(e, "* needs at least two arguments");
    std::int64_t coeff = 1;
    std::vector<Expr> non_const;
    for (const auto &a : args) {
      if (a.kind() == Kind::IntConst)
        coeff *= a.int_value();
      else
        non_const.push_back(a);
    }
    if (non_const.size() > 1)
      throw UnsupportedError(
          "non-linear term at " + std::to_string(e.line) + ":" +
          std::to_string(e.col) + ": product of two non-constant terms");
    if (non_const.empty())
      return mk_apply(Op::MulConst, {mk_int(coeff), args.back()});
    return mk_apply(Op::MulConst, {mk_int(coeff), non_const[0]});
  }

  Expr parse_quant(const SExpr &e, QuantKind kind) {
    if (!quantifiers_allowed_)
      fail(e, "quantifiers are not allowed here");
    if (e.items.size() != 3 || !e.items[1].is_list())
      fail(e, "expected (forall ((x Int)...) body)");
    std::vector<Binder> binders;
    for (const auto &b : e.items[1].items) {
      if (!b.is_list() || b.items.size() != 2 || !b.items[0].is_atom)
        fail(b, "expected a (name Int) binder");
      check_declared_name(b.items[0], b.items[0].text);
      Sort s = parse_sort(b.items[1]);
      if (s != Sort::Int)
        fail(b.items[1], "only Int variables may be quantified");
      binders.emplace_back(b.items[0].text, s);
    }
    if (binders.empty())
      fail(e.items[1], "quantifier needs at least one binder");
    push_scope(std::vector<std::pair<std::string, Sort>>(binders.begin(),
                                                         binders.end()));
    Expr body = parse(e.items[2]);
    pop_scope();
    return mk_quant(kind, std::move(binders), body);
  }

  const Problem &prob_;
  bool quantifiers_allowed_;
  std::vector<std::map<std::string, Sort>> scopes_;
  const Grammar *grammar_ = nullptr;
};

Grammar parse_grammar(const SExpr &decls, const SExpr &rules,
                      const Problem &prob, const SynthFun &fun) {
  Grammar g;
  for (const auto &d : decls.items) {
    if (!d.is_list() || d.items.size() != 2 || !d.items[0].is_atom)
      fail(d, "expected a (Nonterminal Sort) pair");
    check_declared_name(d.items[0], d.items[0].text);
    g.nonterminals.emplace_back(d.items[0].text, parse_sort(d.items[1]));
  }
  if (g.nonterminals.empty())
    fail(decls, "grammar declares no nonterminals");
  g.start = g.nonterminals[0].first;
  if (rules.items.size() != g.nonterminals.size())
    fail(rules, "grammar rule groups do not match the declared nonterminals");
  TermParser tp(prob);
  tp.set_grammar_context(&g);
  tp.push_scope(fun.params);
  for (std::size_t i = 0; i < rules.items.size(); i++) {
    const SExpr &group = rules.items[i];
    if (!group.is_list() || group.items.size() != 3 || !group.items[0].is_atom)
      fail(group, "expected (Nonterminal Sort (production...))");
    if (group.items[0].text != g.nonterminals[i].first)
      fail(group.items[0], "rule group order must match the declaration list");
    if (parse_sort(group.items[1]) != g.nonterminals[i].second)
      fail(group.items[1], "rule group sort differs from the declaration");
    const SExpr &terms = group.items[2];
    if (!terms.is_list() || terms.items.empty())
      fail(terms, "expected a nonempty production list");
    std::vector<Expr> prods;
    for (const SExpr &term : terms.items) {
      Expr t = tp.parse(term);
      if (t.sort() != g.nonterminals[i].second)
        fail(term, "production sort mismatch");
      prods.push_back(t);
    }
    g.productions.push_back(std::move(prods));
  }
  return g;
}

} // namespace

Problem parse_problem(const std::string &text) {
  Lexer lex(text);
  Problem p;
  bool saw_logic = false;
  while (auto cmd = next_sexpr(lex)) {
    const SExpr &e = *cmd;
    if (!e.is_list() || e.items.empty() || !e.items[0].is_atom)
      fail(e, "expected a command");
    const std::string &name = e.items[0].text;
    if (name == "set-logic") {
      if (e.items.size() != 2 || !e.items[1].is_atom)
        fail(e, "expected (set-logic <symbol>)");
      if (saw_logic)
        fail(e, "duplicate set-logic");
      p.logic = e.items[1].text;
      saw_logic = true;
    } else if (name == "declare-var") {
      if (e.items.size() != 3 || !e.items[1].is_atom)
        fail(e, "expected (declare-var <symbol> <sort>)");
      check_declared_name(e.items[1], e.items[1].text);
      if (p.var_sort(e.items[1].text) || p.find_fun(e.items[1].text))
        fail(e.items[1], "duplicate declaration of '" + e.items[1].text + "'");
      p.declared_vars.emplace_back(e.items[1].text, parse_sort(e.items[2]));
    } else if (name == "synth-fun") {
      if (e.items.size() < 4 || !e.items[1].is_atom || !e.items[2].is_list())
        fail(e, "expected (synth-fun <symbol> (<params>) <sort> [grammar])");
      check_declared_name(e.items[1], e.items[1].text);
      if (p.var_sort(e.items[1].text) || p.find_fun(e.items[1].text))
        fail(e.items[1], "duplicate declaration of '" + e.items[1].text + "'");
      SynthFun f;
      f.name = e.items[1].text;
      for (const auto &param : e.items[2].items) {
        if (!param.is_list() || param.items.size() != 2 ||
            !param.items[0].is_atom)
          fail(param, "expected a (name Sort) parameter");
        check_declared_name(param.items[0], param.items[0].text);
        f.params.emplace_back(param.items[0].text, parse_sort(param.items[1]));
      }
      f.return_sort = parse_sort(e.items[3]);
      if (e.items.size() == 6)
        f.grammar = parse_grammar(e.items[4], e.items[5], p, f);
      else if (e.items.size() != 4)
        fail(e, "expected (synth-fun <symbol> (<params>) <sort> [grammar])");
      p.synth_funs.push_back(std::move(f));
    } else if (name == "constraint") {
      if (e.items.size() != 2)
        fail(e, "expected (constraint <term>)");
      TermParser tp(p);
      Expr c = tp.parse(e.items[1]);
      if (c.sort() != Sort::Bool)
        fail(e.items[1], "constraint must be boolean");
      p.constraints.push_back(c);
    } else if (name == "check-synth") {
      if (e.items.size() != 1)
        fail(e, "expected (check-synth)");
    } else {
      fail(e, "unknown command '" + name + "'");
    }
  }
  return p;
}

Expr parse_term(const std::string &text, const Problem &p,
                const std::vector<std::pair<std::string, Sort>> &extra_vars) {
  Lexer lex(text);
  auto sexpr = next_sexpr(lex);
  if (!sexpr)
    throw ParseError(1, 1, "expected a term");
  TermParser tp(p);
  if (!extra_vars.empty())
    tp.push_scope(extra_vars);
  return tp.parse(*sexpr);
}

// --- printing -------------------------------------------------------------

std::string print_sort(Sort s) { return to_string(s); }

namespace {

const char *op_symbol(Op op) {
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
    return "distinct"; // printed via not/=; here for completeness
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

void print_term_rec(std::ostream &os, const Expr &e) {
  switch (e.kind()) {
  case Kind::IntConst:
    if (e.int_value() < 0)
      os << "(- " << -e.int_value() << ")";
    else
      os << e.int_value();
    return;
  case Kind::BoolConst:
    os << (e.bool_value() ? "true" : "false");
    return;
  case Kind::Var:
    os << e.name();
    return;
  case Kind::Apply: {
    if (e.op() == Op::Neq) { // lowered: the surface syntax has no distinct
      os << "(not (= ";
      print_term_rec(os, e.args()[0]);
      os << " ";
      print_term_rec(os, e.args()[1]);
      os << "))";
      return;
    }
    os << "(" << op_symbol(e.op());
    for (const auto &a : e.args()) {
      os << " ";
      print_term_rec(os, a);
    }
    os << ")";
    return;
  }
  case Kind::Select:
  case Kind::Store: {
    os << (e.kind() == Kind::Select ? "(select" : "(store");
    for (const auto &a : e.args()) {
      os << " ";
      print_term_rec(os, a);
    }
    os << ")";
    return;
  }
  case Kind::Quant: {
    os << (e.quant_kind() == QuantKind::Forall ? "(forall (" : "(exists (");
    for (std::size_t i = 0; i < e.binders().size(); i++) {
      if (i)
        os << " ";
      os << "(" << e.binders()[i].first << " "
         << print_sort(e.binders()[i].second) << ")";
    }
    os << ") ";
    print_term_rec(os, e.body());
    os << ")";
    return;
  }
  case Kind::SynthApp: {
    if (e.args().empty()) {
      os << e.name();
      return;
    }
    os << "(" << e.name();
    for (const auto &a : e.args()) {
      os << " ";
      print_term_rec(os, a);
    }
    os << ")";
    return;
  }
  }
}

bool contains_quantifier(const Expr &e) {
  if (e.kind() == Kind::Quant)
    return true;
  for (const auto &a : e.args())
    if (contains_quantifier(a))
      return true;
  return false;
}

void print_grammar(std::ostream &os, const Grammar &g) {
  os << "\n    (";
  for (std::size_t i = 0; i < g.nonterminals.size(); i++) {
    if (i)
      os << " ";
    os << "(" << g.nonterminals[i].first << " "
       << print_sort(g.nonterminals[i].second) << ")";
  }
  os << ")\n    (";
  for (std::size_t i = 0; i < g.nonterminals.size(); i++) {
    if (i)
      os << "\n     ";
    os << "(" << g.nonterminals[i].first << " "
       << print_sort(g.nonterminals[i].second) << " (";
    for (std::size_t j = 0; j < g.productions[i].size(); j++) {
      if (j)
        os << " ";
      os << print_term(g.productions[i][j]);
    }
    os << "))";
  }
  os << ")";
}

} // namespace

std::string print_term(const Expr &e) {
  std::ostringstream os;
  print_term_rec(os, e);
  return os.str();
}

std::string print_sygus(const Problem &p, bool allow_quantifiers) {
  std::ostringstream os;
  os << "(set-logic " << p.logic << ")\n";
  for (const auto &v : p.declared_vars)
    os << "(declare-var " << v.first << " " << print_sort(v.second) << ")\n";
  for (const auto &f : p.synth_funs) {
    os << "(synth-fun " << f.name << " (";
    for (std::size_t i = 0; i < f.params.size(); i++) {
      if (i)
        os << " ";
      os << "(" << f.params[i].first << " " << print_sort(f.params[i].second)
         << ")";
    }
    os << ") " << print_sort(f.return_sort);
    if (f.grammar)
      print_grammar(os, *f.grammar);
    os << ")\n";
  }
  for (const auto &c : p.constraints) {
    if (!allow_quantifiers && contains_quantifier(c))
      throw FormatError("constraint contains a quantifier: " + print_term(c));
    os << "(constraint " << print_term(c) << ")\n";
  }
  os << "(check-synth)\n";
  return os.str();
}

std::string print_smtlib_query(
    const std::vector<std::pair<std::string, Sort>> &decls,
    const Expr &assertion, const std::string &logic) {
  std::ostringstream os;
  os << "(set-logic " << logic << ")\n";
  for (const auto &d : decls)
    os << "(declare-fun " << d.first << " () " << print_sort(d.second)
       << ")\n";
  os << "(assert " << print_term(assertion) << ")\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

// --- reply parsing --------------------------------------------------------

namespace {

// Parses a ground model value from a define-fun body: integer and boolean
// literals, and arrays written as store chains over ((as const ...) d).
std::optional<std::int64_t> ground_int(const SExpr &e) {
  if (e.is_atom && e.is_numeral)
    return std::stoll(e.text);
  if (e.is_list() && e.items.size() == 2 && e.items[0].atom_is("-") &&
      e.items[1].is_atom && e.items[1].is_numeral)
    return -std::stoll(e.items[1].text);
  return std::nullopt;
}

std::optional<ModelValue> parse_model_value(const SExpr &e, Sort sort) {
  switch (sort) {
  case Sort::Int: {
    auto v = ground_int(e);
    if (!v)
      return std::nullopt;
    return ModelValue(*v);
  }
  case Sort::Bool:
    if (e.atom_is("true"))
      return ModelValue(true);
    if (e.atom_is("false"))
      return ModelValue(false);
    return std::nullopt;
  case Sort::IntArray: {
    ArrayModel m;
    const SExpr *cur = &e;
    std::vector<std::pair<std::int64_t, std::int64_t>> stores;
    while (cur->is_list() && cur->items.size() == 4 &&
           cur->items[0].atom_is("store")) {
      auto idx = ground_int(cur->items[2]);
      auto val = ground_int(cur->items[3]);
      if (!idx || !val)
        return std::nullopt;
      stores.emplace_back(*idx, *val);
      cur = &cur->items[1];
    }
    // expect ((as const (Array Int Int)) d)
    if (!(cur->is_list() && cur->items.size() == 2 &&
          cur->items[0].is_list() && cur->items[0].items.size() == 3 &&
          cur->items[0].items[0].atom_is("as") &&
          cur->items[0].items[1].atom_is("const")))
      return std::nullopt;
    auto def = ground_int(cur->items[1]);
    if (!def)
      return std::nullopt;
    m.def = *def;
    // innermost store first; later (outer) stores win
    for (auto it = stores.rbegin(); it != stores.rend(); ++it)
      m.entries[it->first] = it->second;
    return ModelValue(std::move(m));
  }
  }
  return std::nullopt;
}

} // namespace

ParsedReply parse_reply(const std::string &text, const Problem &p) {
  try {
    Lexer lex(text);
    bool saw_sat = false, saw_unsat = false, saw_unknown = false;
    std::map<std::string, Expr> defs;
    Model model;
    std::vector<SExpr> define_funs;

    std::function<void(const SExpr &)> take = [&](const SExpr &e) {
      if (e.is_atom) {
        if (e.text == "sat")
          saw_sat = true;
        else if (e.text == "unsat" || e.text == "infeasible" ||
                 e.text == "fail")
          saw_unsat = true;
        else if (e.text == "unknown")
          saw_unknown = true;
        return;
      }
      if (e.items.empty())
        return;
      if (e.items[0].atom_is("define-fun")) {
        define_funs.push_back(e);
        return;
      }
      if (e.items[0].atom_is("model") || e.items[0].is_list()) {
        // (model entry...) or a bare list of entries
        std::size_t start = e.items[0].atom_is("model") ? 1 : 0;
        for (std::size_t i = start; i < e.items.size(); i++)
          take(e.items[i]);
        return;
      }
      // anything else ((error "..."), etc.) is ignored
    };

    while (auto e = next_sexpr(lex))
      take(*e);

    for (const SExpr &e : define_funs) {
      if (e.items.size() != 5 || !e.items[1].is_atom || !e.items[2].is_list())
        return ReplyMalformed{"malformed define-fun"};
      const std::string &name = e.items[1].text;
      Sort ret = parse_sort(e.items[3]);
      if (const SynthFun *f = p.find_fun(name)) {
        if (e.items[2].items.size() != f->params.size())
          return ReplyMalformed{"define-fun for '" + name +
                                "' has wrong arity"};
        std::vector<std::pair<std::string, Sort>> params;
        for (std::size_t i = 0; i < e.items[2].items.size(); i++) {
          const SExpr &prm = e.items[2].items[i];
          if (!prm.is_list() || prm.items.size() != 2 || !prm.items[0].is_atom)
            return ReplyMalformed{"malformed parameter list for '" + name +
                                  "'"};
          Sort ps = parse_sort(prm.items[1]);
          if (ps != f->params[i].second)
            return ReplyMalformed{"parameter sort mismatch for '" + name +
                                  "'"};
          params.emplace_back(prm.items[0].text, ps);
        }
        if (ret != f->return_sort)
          return ReplyMalformed{"return sort mismatch for '" + name + "'"};
        TermParser tp(p);
        tp.push_scope(params);
        Expr body = tp.parse(e.items[4]);
        if (body.sort() != ret)
          return ReplyMalformed{"body sort mismatch for '" + name + "'"};
        // normalize parameter names to the declared signature
        for (std::size_t i = 0; i < params.size(); i++)
          if (params[i].first != f->params[i].first)
            body = substitute(body, params[i].first,
                              mk_var(f->params[i].first, params[i].second));
        defs.emplace(name, body);
      } else if (e.items[2].items.empty()) {
        // zero-parameter definition: a model entry for a declared variable
        auto sort = p.var_sort(name);
        if (!sort)
          continue; // auxiliary solver symbol, ignore
        auto v = parse_model_value(e.items[4], *sort);
        if (!v)
          return ReplyMalformed{"unsupported model value for '" + name + "'"};
        model.emplace(name, std::move(*v));
      } else {
        return ReplyMalformed{"define-fun for unknown function '" + name +
                              "'"};
      }
    }

    if (!defs.empty()) {
      for (const auto &f : p.synth_funs)
        if (!defs.count(f.name))
          return ReplyMalformed{"missing definition for '" + f.name + "'"};
      return ReplyDefineFuns{std::move(defs)};
    }
    if (saw_sat)
      return ReplySat{std::move(model)};
    if (saw_unsat)
      return ReplyUnsat{};
    if (saw_unknown)
      return ReplyUnknown{};
    return ReplyMalformed{"unrecognized solver output"};
  } catch (const std::exception &ex) {
    return ReplyMalformed{ex.what()};
  }
}

} // namespace synrg
