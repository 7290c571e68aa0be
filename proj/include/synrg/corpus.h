// Loader for the shipped benchmark corpus: .sl problems in three
// categories, each with a JSON sidecar recording the expected bound,
// generalization phase and candidate solution.
#ifndef SYNRG_CORPUS_H
#define SYNRG_CORPUS_H

#include <map>
#include <string>
#include <vector>

#include "synrg/problem.h"

namespace synrg {

enum class CorpusCategory { CraftedInvariant, SvCompStyle, Sketching };

// Subdirectory holding a category's files: crafted/, svcomp/, sketch/.
const char *category_dir(CorpusCategory c);

struct GoldenCase {
  std::string input; // path to the .sl file
  Problem problem;
  int expected_bound = 2;
  std::string expected_phase; // "syntactic" or "synthesis-based"
  // synth-fun name -> expected body, parsed in the function's parameter
  // scope; expectations are up to logical equivalence on the bounded domain
  std::map<std::string, Expr> expected_candidates;
  std::string notes;
};

// Loads every case of a category from `root` (the corpus directory).
// Throws ParseError on malformed .sl files and FormatError when a sidecar
// is missing or inconsistent with its problem.
std::vector<GoldenCase> load_corpus(CorpusCategory c, const std::string &root);

} // namespace synrg

#endif
