#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catforge/cat/validate.hpp"

namespace catforge::rollout {

using cat::CatBundle;

// What a policy is allowed to see: the running chat, nothing else.
struct TranscriptEntry {
  std::string role;  // "system" | "assistant" | "user"
  std::string content;
};
using Transcript = std::vector<TranscriptEntry>;

// One decision: run code, talk to the user, or submit the final answer.
struct PolicyStep {
  enum class Kind { Code, Message, Answer };
  Kind kind = Kind::Code;
  std::string text;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyStep next_action(const Transcript& transcript) = 0;
  virtual std::string name() const = 0;
  // Trial seed; deterministic policies may ignore it.
  virtual void reseed(std::uint64_t) {}
};

// Assistant-message wire format: an optional free-text thought, then one
// ACTION / MESSAGE / ANSWER block closed by END <marker>.
std::string render_markup(const PolicyStep& step);
std::optional<PolicyStep> parse_markup(const std::string& content);

struct Trajectory {
  enum class End { AnswerSubmitted, StopToken, Exhausted, Error };

  struct Step {
    PolicyStep action;
    std::string observation;  // text that came back
    std::string obs_kind;     // tool_result | tool_error | user_message
  };

  std::string task_ref;
  envs::EnvKind env_kind = envs::EnvKind::Retail;
  std::uint64_t seed = 0;  // trial seed, not the world seed
  std::string system_prompt;
  std::vector<Step> steps;  // answer submission is terminal, not a step
  std::string final_answer;
  End terminated_by = End::Error;
  int reward = 0;
  std::string policy_name;
  std::string final_snapshot;  // only when options.keep_snapshot
};

const char* to_string(Trajectory::End end);
std::optional<Trajectory::End> parse_end(const std::string& text);

// One JSON object per trajectory; snapshots ride along only when present.
std::string trajectory_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const std::string& line);
void save_trajectories(const std::string& path, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> load_trajectories(const std::string& path);

struct RolloutOptions {
  std::int64_t max_steps = 15;
  bool keep_snapshot = false;
  // Malformed policy output triggers a corrective user message this many
  // times before the episode is abandoned.
  int format_retries = 2;
};

// Raised by chat policies when the transport gives up; the episode loop
// turns it into terminated_by = Error with reward 0.
class PolicyTransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string executor_system_prompt(const envs::Environment& env,
                                   const std::string& instruction);
std::string challenger_system_prompt(const envs::Environment& env);

// Runs one graded episode: world from bundle.base_seed, reward from the
// bundle's verifier over the terminal state and submitted answer.
Trajectory run_executor_episode(const CatBundle& bundle, Policy& policy,
                                std::uint64_t seed, const RolloutOptions& options = {});

// Restores the trajectory's terminal snapshot and grades it again.
int recompute_reward(const CatBundle& bundle, const Trajectory& trajectory);

class MalformedAnswer : public std::runtime_error {
 public:
  explicit MalformedAnswer(const std::string& detail)
      : std::runtime_error("MalformedAnswer: " + detail) {}
};

class ExplorationExhausted : public std::runtime_error {
 public:
  explicit ExplorationExhausted(const std::string& detail)
      : std::runtime_error("ExplorationExhausted: " + detail) {}
};

// The challenger's terminal answer: instruction, verifier, solution, and
// failure cases in tag format.
CatBundle parse_cat_answer(const std::string& text, envs::EnvKind kind,
                           std::uint64_t base_seed);

// Lets a policy explore a fresh world (hidden tools visible), then turns
// its ANSWER into a bundle. Throws MalformedAnswer / ExplorationExhausted.
CatBundle run_challenger_episode(envs::EnvKind kind, Policy& policy, std::uint64_t seed,
                                 envs::Scale scale = envs::Scale::Small,
                                 const RolloutOptions& options = {});

}  // namespace catforge::rollout
