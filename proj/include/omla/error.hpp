#pragma once

#include <stdexcept>
#include <string>

namespace omla {

/// Failure categories. The CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_argument,    // bad input data or flags
  contract_violation,  // a precondition or invariant of a pipeline stage broke
  limits_exceeded,     // exact oracles refuse instances beyond their caps
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace omla
