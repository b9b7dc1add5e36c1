#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "catforge/ctl/interpreter.hpp"
#include "catforge/env/state.hpp"

namespace catforge::env {

struct ToolParam {
  std::string name;
  std::string type;  // "string" | "int" | "number" | "bool" | "list" | "map"
  bool required = true;
};

struct ToolSpec {
  std::string name;
  std::vector<ToolParam> params;
  std::string doc;
  bool mutates = false;
  bool hidden_from_executor = false;
};

class ToolError : public std::runtime_error {
 public:
  enum class Code { NotFound, IneligibleStatus, InvalidItem, BadArgument };
  ToolError(Code code, const std::string& detail);
  Code code;
};

const char* to_string(ToolError::Code code);

using ToolFn = std::function<Value(EnvState&, const Value::Map&)>;

// Immutable after construction; argument schemas are checked before the
// handler runs.
class ToolRegistry {
 public:
  void add(ToolSpec spec, ToolFn fn);
  const ToolSpec* find(const std::string& name) const;
  Value invoke(const std::string& name, EnvState& state, const Value::Map& args) const;
  const std::vector<ToolSpec>& specs() const { return specs_; }

 private:
  std::vector<ToolSpec> specs_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<ToolFn> fns_;
};

enum class EpisodeMode { Executor, Challenger };

// CTL-facing adapter: resolves names against the registry (executor mode
// cannot see hidden tools) and converts ToolError into RuntimeError, so the
// error code name lands in the observation text.
class RegistryToolHandle : public ctl::ToolHandle {
 public:
  RegistryToolHandle(const ToolRegistry& registry, EnvState& state, EpisodeMode mode)
      : registry_(registry), state_(state), mode_(mode) {}
  Value call(const std::string& name, const Value::Map& args, ctl::SourcePos pos) override;

 private:
  const ToolRegistry& registry_;
  EnvState& state_;
  EpisodeMode mode_;
};

}  // namespace catforge::env
