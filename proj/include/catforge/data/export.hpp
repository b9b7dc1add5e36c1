#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catforge/rollout/rollout.hpp"

namespace catforge::data {

using ctl::Value;

struct ChatMessage {
  std::string role;  // "system" | "assistant" | "user"
  std::string content;
};

// One trajectory in training form: tool docs and task as the system turn,
// agent blocks as assistant turns, observations and user replies as user
// turns. The mask marks assistant turns, the only ones trained on.
struct ChatSample {
  std::vector<ChatMessage> messages;
  std::vector<bool> mask;
  Value::Map meta;  // task, env, reward, seed, policy, terminated_by
};

ChatSample render_chat(const rollout::Trajectory& trajectory);

// Inverse of render_chat for the action stream: assistant messages parse
// back into the exact steps the policy took, final answer included.
std::vector<rollout::PolicyStep> parse_chat_actions(const ChatSample& sample);

std::string chat_sample_json(const ChatSample& sample);  // one JSONL line

struct PreferencePair {
  std::string prompt;  // shared system turn of the paired episodes
  std::vector<ChatMessage> chosen;
  std::vector<ChatMessage> rejected;
  Value::Map meta;
};

std::string preference_pair_json(const PreferencePair& pair);

struct ExportOptions {
  // Samples above this many content characters (a ~4-chars-per-token proxy
  // for a 16,192-token cutoff) are dropped, not truncated.
  std::int64_t max_chars = 64768;
  int pairs_per_task = 4;
  std::uint64_t seed = 0;  // picks which cross pairs survive the cap
};

struct ExportStats {
  std::int64_t written = 0;
  std::int64_t dropped_overlength = 0;
  // Tasks that could not form a single pair (no success or no failure).
  std::int64_t tasks_without_pairs = 0;
};

// Rejection-sampling export: only reward-1 trajectories.
ExportStats export_rft(const std::vector<rollout::Trajectory>& trajectories,
                       const std::string& path, const ExportOptions& options = {});

// Distillation export: every trajectory; only_success narrows it to the
// reward-1 subset and is then byte-identical to export_rft.
ExportStats export_distill(const std::vector<rollout::Trajectory>& trajectories,
                           const std::string& path, bool only_success,
                           const ExportOptions& options = {});

// Cross-pairs success and failure episodes of the same task, at most
// pairs_per_task per task; deterministic in options.seed.
std::vector<PreferencePair> make_preference_pairs(
    const std::vector<rollout::Trajectory>& trajectories, const ExportOptions& options,
    ExportStats* stats = nullptr);

ExportStats export_dpo(const std::vector<rollout::Trajectory>& trajectories,
                       const std::string& path, const ExportOptions& options = {});

}  // namespace catforge::data
