#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catforge/ctl/ast.hpp"
#include "catforge/ctl/value.hpp"

namespace catforge::ctl {

struct EvalLimits {
  std::int64_t max_steps = 10000;
  std::int64_t max_value_bytes = 1048576;
  std::int64_t max_tool_calls = 64;
};

struct ToolCallRecord {
  std::string name;
  Value args;      // always a Map
  Value returned;
};

struct EvalOutcome {
  Value result;
  std::vector<ToolCallRecord> tool_trace;
  std::int64_t steps_used = 0;
};

// Bridge to whatever owns the environment; implementations throw
// RuntimeError (UnknownTool for unregistered names).
class ToolHandle {
 public:
  virtual ~ToolHandle() = default;
  virtual Value call(const std::string& name, const Value::Map& args, SourcePos pos) = 0;
};

// Deterministic given (program, state behind the handle, limits, bindings).
// `bindings` pre-populates variables (the executor's final answer is passed
// to verifiers this way). Result is the `return` value, else the variable
// `result`, else Null.
EvalOutcome evaluate(const Program& program, ToolHandle* tools = nullptr,
                     const EvalLimits& limits = {}, const Value::Map& bindings = {});

// Strict: Bool passes through, anything else is a TypeMismatch.
bool coerce_bool(const Value& v);

}  // namespace catforge::ctl
