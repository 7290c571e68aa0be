#ifndef SYNRG_ERRORS_H
#define SYNRG_ERRORS_H

#include <stdexcept>
#include <string>

namespace synrg {

struct SortError : std::runtime_error {
  explicit SortError(const std::string &msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line, int column, const std::string &msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + msg),
        line(line), column(column) {}
};

struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string &msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string &msg) : std::runtime_error(msg) {}
};

struct NotSkolemizableError : std::runtime_error {
  explicit NotSkolemizableError(const std::string &msg)
      : std::runtime_error(msg) {}
};

struct EmptyIndexSetError : std::runtime_error {
  explicit EmptyIndexSetError(const std::string &msg)
      : std::runtime_error(msg) {}
};

struct OracleTooLarge : std::runtime_error {
  explicit OracleTooLarge(const std::string &msg) : std::runtime_error(msg) {}
};

struct BackendUnavailable : std::runtime_error {
  explicit BackendUnavailable(const std::string &msg)
      : std::runtime_error(msg) {}
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace synrg

#endif
