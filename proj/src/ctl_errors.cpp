#include "catforge/ctl/errors.hpp"

namespace catforge::ctl {

namespace {

std::string format_syntax(SourcePos pos, const std::string& detail) {
  return "SyntaxError: " + detail + " (line " + std::to_string(pos.line) + ", col " +
         std::to_string(pos.col) + ")";
}

std::string format_runtime(RunErrorKind kind, SourcePos pos, const std::string& detail) {
  std::string out(to_string(kind));
  out += ": ";
  out += detail;
  if (pos.line > 0) {
    out += " (line " + std::to_string(pos.line) + ")";
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(SourcePos p, const std::string& detail)
    : std::runtime_error(format_syntax(p, detail)), pos(p) {}

std::string_view to_string(RunErrorKind kind) {
  switch (kind) {
    case RunErrorKind::UnknownTool: return "UnknownTool";
    case RunErrorKind::TypeMismatch: return "TypeMismatch";
    case RunErrorKind::KeyMissing: return "KeyMissing";
    case RunErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case RunErrorKind::DivByZero: return "DivByZero";
    case RunErrorKind::LimitExceeded: return "LimitExceeded";
  }
  return "RuntimeError";
}

RuntimeError::RuntimeError(RunErrorKind k, SourcePos p, const std::string& detail)
    : std::runtime_error(format_runtime(k, p, detail)), kind(k), pos(p) {}

}  // namespace catforge::ctl
