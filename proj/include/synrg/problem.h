// Synthesis problem data model: declared variables, functions to synthesize
// (with optional grammars), and constraints.
#ifndef SYNRG_PROBLEM_H
#define SYNRG_PROBLEM_H

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synrg/ast.h"

namespace synrg {

// A context-free term grammar.  Production templates are ordinary
// expressions in which a Var whose name equals a nonterminal stands for a
// placeholder to be expanded.
struct Grammar {
  std::vector<std::pair<std::string, Sort>> nonterminals;
  std::string start;
  // productions[i] belongs to nonterminals[i]
  std::vector<std::vector<Expr>> productions;

  bool is_nonterminal(const std::string &name) const {
    for (const auto &nt : nonterminals)
      if (nt.first == name)
        return true;
    return false;
  }
  const std::vector<Expr> &productions_of(const std::string &name) const;
};

struct SynthFun {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  Sort return_sort = Sort::Bool;
  std::optional<Grammar> grammar;
};

struct Problem {
  std::string logic = "ALIA";
  std::vector<std::pair<std::string, Sort>> declared_vars;
  std::vector<SynthFun> synth_funs;
  std::vector<Expr> constraints;

  const SynthFun *find_fun(const std::string &name) const {
    for (const auto &f : synth_funs)
      if (f.name == name)
        return &f;
    return nullptr;
  }
  std::optional<Sort> var_sort(const std::string &name) const {
    for (const auto &v : declared_vars)
      if (v.first == name)
        return v.second;
    return std::nullopt;
  }
};

} // namespace synrg

#endif
