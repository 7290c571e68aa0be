#include "synrg/corpus.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synrg/errors.h"
#include "synrg/sygus_io.h"

namespace synrg {

const char *category_dir(CorpusCategory c) {
  switch (c) {
  case CorpusCategory::CraftedInvariant:
    return "crafted";
  case CorpusCategory::SvCompStyle:
    return "svcomp";
  case CorpusCategory::Sketching:
    return "sketch";
  }
  return "";
}

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw FormatError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GoldenCase load_case(const std::filesystem::path &sl) {
  GoldenCase c;
  c.input = sl.string();
  c.problem = parse_problem(read_file(sl));

  std::filesystem::path sidecar = sl;
  sidecar.replace_extension(".expected.json");
  if (!std::filesystem::exists(sidecar))
    throw FormatError("missing sidecar " + sidecar.string());
  nlohmann::json j = nlohmann::json::parse(read_file(sidecar));

  c.expected_bound = j.at("bound").get<int>();
  c.expected_phase = j.at("phase").get<std::string>();
  if (c.expected_phase != "syntactic" && c.expected_phase != "synthesis-based")
    throw FormatError("unknown phase in " + sidecar.string());
  if (j.contains("notes"))
    c.notes = j.at("notes").get<std::string>();
  for (const auto &[fun, text] : j.at("candidates").items()) {
    const SynthFun *f = c.problem.find_fun(fun);
    if (!f)
      throw FormatError("sidecar " + sidecar.string() +
                        " names unknown function " + fun);
    c.expected_candidates[fun] =
        parse_term(text.get<std::string>(), c.problem, f->params);
  }
  if (c.expected_candidates.size() != c.problem.synth_funs.size())
    throw FormatError("sidecar " + sidecar.string() +
                      " must give one candidate per synth-fun");
  return c;
}

} // namespace

std::vector<GoldenCase> load_corpus(CorpusCategory c, const std::string &root) {
  namespace fs = std::filesystem;
  fs::path dir = fs::path(root) / category_dir(c);
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto &entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".sl")
        files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<GoldenCase> cases;
  cases.reserve(files.size());
  for (const auto &f : files)
    cases.push_back(load_case(f));
  return cases;
}

} // namespace synrg
