#pragma once

#include <stdexcept>
#include <string>

namespace maxent {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind {
  Usage = 1,
  Input = 2,
  NotConverged = 3,
  Infeasible = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace maxent
