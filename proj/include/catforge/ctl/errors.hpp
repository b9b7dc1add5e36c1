#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catforge::ctl {

struct SourcePos {
  int line = 0;
  int col = 0;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SourcePos pos, const std::string& detail);
  SourcePos pos;
};

enum class RunErrorKind {
  UnknownTool,
  TypeMismatch,
  KeyMissing,
  IndexOutOfRange,
  DivByZero,
  LimitExceeded,
};

std::string_view to_string(RunErrorKind kind);

// Aborts evaluation; partial state mutations are the caller's problem.
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(RunErrorKind kind, SourcePos pos, const std::string& detail);
  RunErrorKind kind;
  SourcePos pos;
};

}  // namespace catforge::ctl
