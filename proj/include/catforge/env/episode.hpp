#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>

#include "catforge/env/tools.hpp"

namespace catforge::env {

struct EpisodeConfig {
  std::int64_t max_steps = 15;
  std::uint64_t seed = 0;
  EpisodeMode mode = EpisodeMode::Executor;
};

struct Observation {
  enum class Kind { ToolResult, ToolError, UserMessage, Initial };
  Kind kind;
  Value payload;  // ToolResult: any Value; the rest carry Str

  std::string text() const { return payload.is_str() ? payload.as_str() : ctl::render(payload); }
};

const char* to_string(Observation::Kind kind);

// One agent step: either executable code or a message to the simulated
// user, never both.
struct CodeAction { std::string source; };
struct MessageAction { std::string text; };
using AgentAction = std::variant<CodeAction, MessageAction>;

class EpisodeExhausted : public std::runtime_error {
 public:
  explicit EpisodeExhausted(std::int64_t max_steps)
      : std::runtime_error("EpisodeExhausted: step budget of " +
                           std::to_string(max_steps) + " is spent") {}
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::string name() const = 0;
  // Canonical world for the seed; step_count 0, empty log.
  virtual EnvState reset(std::uint64_t seed) const = 0;
  virtual const ToolRegistry& tools() const = 0;
  // Plain-text scenario blurb for the system prompt.
  virtual std::string description() const = 0;
  // True when rewards come from matching a final answer rather than
  // inspecting state.
  virtual bool answer_mode() const = 0;
};

// Reply of the simulated human user to an agent message.
using UserSim = std::function<std::string(const std::string& agent_message, EnvState& state)>;

// Advances the episode by one step, mutating `state` in place. Tool and
// syntax errors come back as tool_error observations; only an exhausted
// step budget throws.
Observation apply_action(const Environment& env, EnvState& state, const AgentAction& action,
                         const EpisodeConfig& config, const UserSim& user_sim = {});

// Documentation block listing every tool visible in `mode`, written into
// system prompts and dumped by the CLI.
std::string render_tool_docs(const ToolRegistry& registry, EpisodeMode mode);

}  // namespace catforge::env
