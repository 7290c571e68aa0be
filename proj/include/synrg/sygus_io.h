// Reading and writing synthesis problems.  The input format is SyGuS-IF v2
// restricted to linear integer arithmetic with integer-indexed arrays,
// extended so that constraints may contain forall/exists binders over Int.
// Output routines print SyGuS-IF problems and SMT-LIB satisfiability queries;
// a tolerant reply parser classifies whatever a solver process printed.
#ifndef SYNRG_SYGUS_IO_H
#define SYNRG_SYGUS_IO_H

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "synrg/problem.h"

namespace synrg {

// Parse a full problem from SyGuS-IF text.  Throws ParseError (with 1-based
// line/column) on malformed input and UnsupportedError on constructs outside
// the supported fragment (e.g. a product of two non-constant terms).
Problem parse_problem(const std::string &text);

// Parse a single term in the scope of `p`'s declarations plus `extra_vars`.
// Used for golden files and tests.
Expr parse_term(const std::string &text, const Problem &p,
                const std::vector<std::pair<std::string, Sort>> &extra_vars = {});

// Print a problem in SyGuS-IF.  Quantified constraints are only allowed when
// allow_quantifiers is set; otherwise FormatError is thrown.
std::string print_sygus(const Problem &p, bool allow_quantifiers = false);

// Print one term in SMT-LIB/SyGuS surface syntax.
std::string print_term(const Expr &e);

std::string print_sort(Sort s);

// An SMT-LIB check-sat query: declarations, one assertion, check-sat,
// get-model.
std::string print_smtlib_query(
    const std::vector<std::pair<std::string, Sort>> &decls,
    const Expr &assertion, const std::string &logic = "AUFLIA");

// --- solver replies -------------------------------------------------------

// Value of a model entry: scalars, or an array given as a finite map plus a
// default element.
struct ArrayModel {
  std::map<std::int64_t, std::int64_t> entries;
  std::int64_t def = 0;
  bool operator==(const ArrayModel &) const = default;
};
using ModelValue = std::variant<std::int64_t, bool, ArrayModel>;
using Model = std::map<std::string, ModelValue>;

struct ReplyDefineFuns {
  // name -> body, with bodies expressed over the declared parameter names
  std::map<std::string, Expr> definitions;
};
struct ReplySat {
  Model model;
};
struct ReplyUnsat {};
struct ReplyUnknown {};
struct ReplyMalformed {
  std::string reason;
};

using ParsedReply = std::variant<ReplyDefineFuns, ReplySat, ReplyUnsat,
                                 ReplyUnknown, ReplyMalformed>;

// Classify raw solver output.  Never throws: anything unrecognized becomes
// ReplyMalformed.  `p` provides the signature context for define-fun bodies
// and model sorts.
ParsedReply parse_reply(const std::string &text, const Problem &p);

} // namespace synrg

#endif
