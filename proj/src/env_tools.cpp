#include "catforge/env/tools.hpp"

namespace catforge::env {

const char* to_string(ToolError::Code code) {
  switch (code) {
    case ToolError::Code::NotFound: return "NotFound";
    case ToolError::Code::IneligibleStatus: return "IneligibleStatus";
    case ToolError::Code::InvalidItem: return "InvalidItem";
    case ToolError::Code::BadArgument: return "BadArgument";
  }
  return "ToolError";
}

ToolError::ToolError(Code c, const std::string& detail)
    : std::runtime_error(std::string(to_string(c)) + ": " + detail), code(c) {}

void ToolRegistry::add(ToolSpec spec, ToolFn fn) {
  if (by_name_.count(spec.name)) {
    throw std::logic_error("duplicate tool name " + spec.name);
  }
  by_name_[spec.name] = specs_.size();
  specs_.push_back(std::move(spec));
  fns_.push_back(std::move(fn));
}

const ToolSpec* ToolRegistry::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &specs_[it->second];
}

namespace {

bool type_matches(const std::string& type, const Value& v) {
  if (type == "string") return v.is_str();
  if (type == "int") return v.is_int();
  if (type == "number") return v.is_number();
  if (type == "bool") return v.is_bool();
  if (type == "list") return v.is_list();
  if (type == "map") return v.is_map();
  return true;
}

}  // namespace

Value ToolRegistry::invoke(const std::string& name, EnvState& state,
                           const Value::Map& args) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    throw ToolError(ToolError::Code::NotFound, "no tool named '" + name + "'");
  }
  const ToolSpec& spec = specs_[it->second];
  for (const ToolParam& param : spec.params) {
    auto arg = args.find(param.name);
    if (arg == args.end()) {
      if (param.required) {
        throw ToolError(ToolError::Code::BadArgument,
                        name + " requires argument '" + param.name + "'");
      }
      continue;
    }
    if (!type_matches(param.type, arg->second)) {
      throw ToolError(ToolError::Code::BadArgument,
                      name + " argument '" + param.name + "' must be " + param.type +
                          ", got " + arg->second.type_name());
    }
  }
  for (const auto& [key, value] : args) {
    bool known = false;
    for (const ToolParam& param : spec.params) {
      if (param.name == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ToolError(ToolError::Code::BadArgument,
                      name + " got unexpected argument '" + key + "'");
    }
  }
  return fns_[it->second](state, args);
}

Value RegistryToolHandle::call(const std::string& name, const Value::Map& args,
                               ctl::SourcePos pos) {
  const ToolSpec* spec = registry_.find(name);
  if (!spec || (mode_ == EpisodeMode::Executor && spec->hidden_from_executor)) {
    throw ctl::RuntimeError(ctl::RunErrorKind::UnknownTool, pos,
                            "unknown tool '" + name + "'");
  }
  try {
    return registry_.invoke(name, state_, args);
  } catch (const ToolError& e) {
    ctl::RunErrorKind kind =
        (e.code == ToolError::Code::NotFound || e.code == ToolError::Code::InvalidItem)
            ? ctl::RunErrorKind::KeyMissing
            : ctl::RunErrorKind::TypeMismatch;
    throw ctl::RuntimeError(kind, pos, e.what());
  }
}

}  // namespace catforge::env
