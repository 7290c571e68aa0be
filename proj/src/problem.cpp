#include "synrg/problem.h"

#include <stdexcept>

namespace synrg {

const std::vector<Expr> &Grammar::productions_of(const std::string &name) const {
  for (std::size_t i = 0; i < nonterminals.size(); i++)
    if (nonterminals[i].first == name)
      return productions[i];
  throw std::out_of_range("no such nonterminal: " + name);
}

} // namespace synrg
