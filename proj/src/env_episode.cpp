#include "catforge/env/episode.hpp"

#include "catforge/ctl/parser.hpp"

namespace catforge::env {

const char* to_string(Observation::Kind kind) {
  switch (kind) {
    case Observation::Kind::ToolResult: return "tool_result";
    case Observation::Kind::ToolError: return "tool_error";
    case Observation::Kind::UserMessage: return "user_message";
    case Observation::Kind::Initial: return "initial";
  }
  return "observation";
}

namespace {

Observation run_code(const Environment& env, EnvState& state, const std::string& source,
                     const EpisodeConfig& config) {
  ctl::Program program;
  try {
    program = ctl::parse(source);
  } catch (const ctl::SyntaxError& e) {
    return {Observation::Kind::ToolError, Value(std::string(e.what()))};
  }
  RegistryToolHandle handle(env.tools(), state, config.mode);
  try {
    ctl::EvalOutcome out = ctl::evaluate(program, &handle);
    // Show the program's value; a bare tool-call script shows the last
    // tool's response.
    Value payload = out.result;
    if (payload.is_null() && !out.tool_trace.empty()) {
      payload = out.tool_trace.back().returned;
    }
    return {Observation::Kind::ToolResult, std::move(payload)};
  } catch (const ctl::RuntimeError& e) {
    return {Observation::Kind::ToolError, Value(std::string(e.what()))};
  }
}

}  // namespace

Observation apply_action(const Environment& env, EnvState& state, const AgentAction& action,
                         const EpisodeConfig& config, const UserSim& user_sim) {
  if (state.step_count >= config.max_steps) {
    throw EpisodeExhausted(config.max_steps);
  }
  state.step_count += 1;
  Observation obs{Observation::Kind::ToolError, Value()};
  if (const auto* code = std::get_if<CodeAction>(&action)) {
    log_event(state, "action_code", code->source);
    obs = run_code(env, state, code->source, config);
  } else {
    const auto& message = std::get<MessageAction>(action);
    log_event(state, "action_message", message.text);
    std::string reply = user_sim ? user_sim(message.text, state) : std::string("###STOP###");
    obs = {Observation::Kind::UserMessage, Value(reply)};
  }
  log_event(state, to_string(obs.kind), obs.text());
  return obs;
}

std::string render_tool_docs(const ToolRegistry& registry, EpisodeMode mode) {
  std::string out;
  for (const ToolSpec& spec : registry.specs()) {
    if (mode == EpisodeMode::Executor && spec.hidden_from_executor) continue;
    out += "- " + spec.name + "(";
    bool first = true;
    for (const ToolParam& param : spec.params) {
      if (!first) out += ", ";
      first = false;
      out += param.name + ": " + param.type;
      if (!param.required) out += "?";
    }
    out += ")";
    out += spec.mutates ? " [mutates]" : " [read-only]";
    out += ": " + spec.doc + "\n";
  }
  return out;
}

}  // namespace catforge::env
