// Corpus loader tests: category layout, sidecar validation, and the
// semantic round-trip property of every golden candidate.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "synrg/corpus.h"
#include "synrg/errors.h"
#include "synrg/generalization.h"
#include "synrg/restriction.h"
#include "testutil.h"

using namespace synrg;
namespace tu = synrg::testutil;
namespace fs = std::filesystem;

namespace {

const std::vector<CorpusCategory> kCategories = {
    CorpusCategory::CraftedInvariant, CorpusCategory::SvCompStyle,
    CorpusCategory::Sketching};

std::vector<GoldenCase> all_cases() {
  std::vector<GoldenCase> out;
  for (CorpusCategory c : kCategories)
    for (GoldenCase &g : [&] {
           auto v = load_corpus(c, tu::corpus_dir());
           return v;
         }())
      out.push_back(std::move(g));
  return out;
}

const GoldenCase *find_case(const std::vector<GoldenCase> &cases,
                            const std::string &filename) {
  for (const GoldenCase &g : cases)
    if (fs::path(g.input).filename() == filename)
      return &g;
  return nullptr;
}

bool contains_exists(const Expr &e) {
  if (e.kind() == Kind::Quant && e.quant_kind() == QuantKind::Exists)
    return true;
  for (const Expr &a : e.args())
    if (contains_exists(a))
      return true;
  return false;
}

bool reads_offset_index(const Expr &e) {
  if (e.kind() == Kind::Select && e.args()[1].kind() == Kind::Apply)
    return true;
  for (const Expr &a : e.args())
    if (reads_offset_index(a))
      return true;
  return false;
}

// A self-cleaning corpus root with one category subdirectory.
struct TempCorpus {
  fs::path root;
  explicit TempCorpus(const std::string &category) {
    root = fs::temp_directory_path() /
           ("synrg_corpus_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(root / category);
  }
  ~TempCorpus() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  static int counter() {
    static int n = 0;
    return n++;
  }
  void write(const std::string &relative, const std::string &text) {
    std::ofstream out(root / relative);
    out << text;
  }
};

const char *kTinyProblem = "(set-logic ALIA)"
                           "(declare-var A (Array Int Int))"
                           "(synth-fun f ((A (Array Int Int))) Bool)"
                           "(constraint (f A))(check-synth)";

} // namespace

TEST_CASE("category directories have stable names") {
  CHECK(std::string(category_dir(CorpusCategory::CraftedInvariant)) ==
        "crafted");
  CHECK(std::string(category_dir(CorpusCategory::SvCompStyle)) == "svcomp");
  CHECK(std::string(category_dir(CorpusCategory::Sketching)) == "sketch");
}

TEST_CASE("every category ships enough well-formed cases") {
  std::size_t total = 0;
  for (CorpusCategory c : kCategories) {
    std::vector<GoldenCase> cases = load_corpus(c, tu::corpus_dir());
    CHECK(cases.size() >= 4);
    total += cases.size();
    for (const GoldenCase &g : cases) {
      CAPTURE(g.input);
      CHECK(fs::path(g.input).extension() == ".sl");
      CHECK(!g.problem.synth_funs.empty());
      CHECK(!g.problem.constraints.empty());
      CHECK(g.expected_bound >= 1);
      CHECK((g.expected_phase == "syntactic" ||
             g.expected_phase == "synthesis-based"));
      // one candidate per synthesis function, sort-correct in its scope
      CHECK(g.expected_candidates.size() == g.problem.synth_funs.size());
      for (const auto &[name, body] : g.expected_candidates) {
        const SynthFun *f = g.problem.find_fun(name);
        REQUIRE(f != nullptr);
        CHECK(body.sort() == f->return_sort);
      }
    }
  }
  CHECK(total >= 12);
}

TEST_CASE("the flagship cases are present with their defining shapes") {
  std::vector<GoldenCase> cases = all_cases();

  const GoldenCase *nonneg = find_case(cases, "nonneg_sum.sl");
  REQUIRE(nonneg != nullptr);
  // its notes carry the hand-checked inductive argument
  CHECK(nonneg->notes.find("inductive") != std::string::npos);
  CHECK(nonneg->expected_phase == "syntactic");
  CHECK(nonneg->expected_bound == 2);

  CHECK(find_case(cases, "swap_equal.sl") != nullptr);
  CHECK(find_case(cases, "array_init.sl") != nullptr);
  CHECK(find_case(cases, "contains.sl") != nullptr);

  // the membership case needs an exists under the forall
  const GoldenCase *member = find_case(cases, "member_all.sl");
  REQUIRE(member != nullptr);
  bool member_nested = false;
  for (const auto &[name, body] : member->expected_candidates)
    member_nested = member_nested ||
                    (tu::contains_quant(body) && contains_exists(body));
  CHECK(member_nested);

  // the sortedness case needs an offset read A[q + 1]
  const GoldenCase *sorted = find_case(cases, "sorted_shift.sl");
  REQUIRE(sorted != nullptr);
  bool sorted_offset = false;
  for (const auto &[name, body] : sorted->expected_candidates)
    sorted_offset = sorted_offset || reads_offset_index(body);
  CHECK(sorted_offset);

  const GoldenCase *ramp = find_case(cases, "ramp.sl");
  REQUIRE(ramp != nullptr);
  CHECK(ramp->expected_phase == "synthesis-based");
}

TEST_CASE("both generalization phases are represented") {
  std::set<std::string> phases;
  for (const GoldenCase &g : all_cases())
    phases.insert(g.expected_phase);
  CHECK(phases == std::set<std::string>{"syntactic", "synthesis-based"});
}

TEST_CASE("golden candidates survive a restrict-generalize round-trip") {
  // Restricting an expected candidate to its bound, generalizing the result
  // back, and restricting again must land on the same bounded meaning.
  for (const GoldenCase &g : all_cases()) {
    int b = g.expected_bound;
    for (const auto &[name, body] : g.expected_candidates) {
      CAPTURE(g.input);
      CAPTURE(name);
      Expr bounded = restrict_constraint(body, b);
      CHECK(!tu::contains_quant(bounded));
      Expr lifted = syntactic_generalize(bounded, b);
      Expr rebounded = restrict_constraint(lifted, b);
      CHECK(tu::equiv_window(bounded, rebounded, b, -1, 1));
    }
  }
}

TEST_CASE("a missing sidecar is rejected") {
  TempCorpus tmp("crafted");
  tmp.write("crafted/lonely.sl", kTinyProblem);
  CHECK_THROWS_AS(load_corpus(CorpusCategory::CraftedInvariant,
                              tmp.root.string()),
                  FormatError);
}

TEST_CASE("an unknown phase is rejected") {
  TempCorpus tmp("crafted");
  tmp.write("crafted/odd.sl", kTinyProblem);
  tmp.write("crafted/odd.expected.json",
            R"({"bound": 2, "phase": "magic", "candidates": {"f": "true"}})");
  CHECK_THROWS_AS(load_corpus(CorpusCategory::CraftedInvariant,
                              tmp.root.string()),
                  FormatError);
}

TEST_CASE("a sidecar naming an unknown function is rejected") {
  TempCorpus tmp("crafted");
  tmp.write("crafted/odd.sl", kTinyProblem);
  tmp.write("crafted/odd.expected.json",
            R"({"bound": 2, "phase": "syntactic", "candidates": {"g": "true"}})");
  CHECK_THROWS_AS(load_corpus(CorpusCategory::CraftedInvariant,
                              tmp.root.string()),
                  FormatError);
}

TEST_CASE("a sidecar must cover every synthesis function") {
  TempCorpus tmp("crafted");
  tmp.write("crafted/odd.sl", kTinyProblem);
  tmp.write("crafted/odd.expected.json",
            R"({"bound": 2, "phase": "syntactic", "candidates": {}})");
  CHECK_THROWS_AS(load_corpus(CorpusCategory::CraftedInvariant,
                              tmp.root.string()),
                  FormatError);
}

TEST_CASE("a malformed problem file is a parse error") {
  TempCorpus tmp("svcomp");
  tmp.write("svcomp/bad.sl", "(declare-var ((\n");
  tmp.write("svcomp/bad.expected.json",
            R"({"bound": 2, "phase": "syntactic", "candidates": {}})");
  CHECK_THROWS_AS(load_corpus(CorpusCategory::SvCompStyle, tmp.root.string()),
                  ParseError);
}

TEST_CASE("an empty corpus directory loads as empty") {
  TempCorpus tmp("sketch");
  CHECK(load_corpus(CorpusCategory::Sketching, tmp.root.string()).empty());
  // and a root without the category directory behaves the same
  CHECK(load_corpus(CorpusCategory::CraftedInvariant, tmp.root.string())
            .empty());
}
