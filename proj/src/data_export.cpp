#include "catforge/data/export.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

#include "catforge/util/hash.hpp"
#include "catforge/util/io.hpp"
#include "catforge/util/jsonv.hpp"
#include "catforge/util/rng.hpp"

namespace catforge::data {

namespace {

using nlohmann::json;

std::int64_t sample_chars(const ChatSample& sample) {
  std::int64_t n = 0;
  for (const auto& message : sample.messages) {
    n += static_cast<std::int64_t>(message.content.size());
  }
  return n;
}

std::int64_t pair_chars(const PreferencePair& pair) {
  std::int64_t n = static_cast<std::int64_t>(pair.prompt.size());
  for (const auto& message : pair.chosen) n += static_cast<std::int64_t>(message.content.size());
  for (const auto& message : pair.rejected) n += static_cast<std::int64_t>(message.content.size());
  return n;
}

json messages_json(const std::vector<ChatMessage>& messages) {
  json out = json::array();
  for (const auto& message : messages) {
    out.push_back({{"role", message.role}, {"content", message.content}});
  }
  return out;
}

// Stable per-task stream for the pair draw; independent of task order.
std::uint64_t task_stream(const std::string& task_ref) {
  const std::string hex = util::sha256_hex(task_ref).substr(0, 16);
  return std::stoull(hex, nullptr, 16);
}

ExportStats write_samples(const std::vector<rollout::Trajectory>& trajectories,
                          const std::string& path, bool only_success,
                          const ExportOptions& options) {
  ExportStats stats;
  std::string out;
  for (const auto& trajectory : trajectories) {
    if (only_success && trajectory.reward != 1) continue;
    const ChatSample sample = render_chat(trajectory);
    if (sample_chars(sample) > options.max_chars) {
      stats.dropped_overlength += 1;
      continue;
    }
    out += chat_sample_json(sample);
    out += "\n";
    stats.written += 1;
  }
  util::atomic_write(path, out);
  return stats;
}

}  // namespace

ChatSample render_chat(const rollout::Trajectory& trajectory) {
  ChatSample sample;
  const auto push = [&](std::string role, std::string content) {
    const bool train = role == "assistant";
    sample.messages.push_back({std::move(role), std::move(content)});
    sample.mask.push_back(train);
  };
  push("system", trajectory.system_prompt);
  for (const auto& step : trajectory.steps) {
    push("assistant", rollout::render_markup(step.action));
    push("user", "[" + step.obs_kind + "] " + step.observation);
  }
  if (trajectory.terminated_by == rollout::Trajectory::End::AnswerSubmitted) {
    push("assistant", rollout::render_markup(
                          {rollout::PolicyStep::Kind::Answer, trajectory.final_answer}));
  }
  sample.meta["task"] = trajectory.task_ref;
  sample.meta["env"] = envs::to_string(trajectory.env_kind);
  sample.meta["reward"] = static_cast<std::int64_t>(trajectory.reward);
  sample.meta["seed"] = static_cast<std::int64_t>(trajectory.seed);
  sample.meta["policy"] = trajectory.policy_name;
  sample.meta["terminated_by"] = rollout::to_string(trajectory.terminated_by);
  return sample;
}

std::vector<rollout::PolicyStep> parse_chat_actions(const ChatSample& sample) {
  std::vector<rollout::PolicyStep> steps;
  for (const auto& message : sample.messages) {
    if (message.role != "assistant") continue;
    const auto step = rollout::parse_markup(message.content);
    if (!step) throw std::runtime_error("assistant message without a valid block");
    steps.push_back(*step);
  }
  return steps;
}

std::string chat_sample_json(const ChatSample& sample) {
  json out;
  out["messages"] = messages_json(sample.messages);
  out["mask"] = sample.mask;
  out["meta"] = util::value_to_json(Value(sample.meta));
  return out.dump();
}

std::string preference_pair_json(const PreferencePair& pair) {
  json out;
  out["prompt"] = pair.prompt;
  out["chosen"] = messages_json(pair.chosen);
  out["rejected"] = messages_json(pair.rejected);
  out["meta"] = util::value_to_json(Value(pair.meta));
  return out.dump();
}

ExportStats export_rft(const std::vector<rollout::Trajectory>& trajectories,
                       const std::string& path, const ExportOptions& options) {
  return write_samples(trajectories, path, /*only_success=*/true, options);
}

ExportStats export_distill(const std::vector<rollout::Trajectory>& trajectories,
                           const std::string& path, bool only_success,
                           const ExportOptions& options) {
  return write_samples(trajectories, path, only_success, options);
}

std::vector<PreferencePair> make_preference_pairs(
    const std::vector<rollout::Trajectory>& trajectories, const ExportOptions& options,
    ExportStats* stats) {
  // Group by task, preserving arrival order within each group.
  std::map<std::string, std::pair<std::vector<const rollout::Trajectory*>,
                                  std::vector<const rollout::Trajectory*>>>
      by_task;
  for (const auto& trajectory : trajectories) {
    auto& bucket = by_task[trajectory.task_ref];
    (trajectory.reward == 1 ? bucket.first : bucket.second).push_back(&trajectory);
  }

  std::vector<PreferencePair> pairs;
  for (const auto& [task, bucket] : by_task) {
    const auto& successes = bucket.first;
    const auto& failures = bucket.second;
    if (successes.empty() || failures.empty()) {
      if (stats) stats->tasks_without_pairs += 1;
      continue;
    }
    const std::size_t all = successes.size() * failures.size();
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(options.pairs_per_task), all);
    std::vector<std::size_t> order(all);
    for (std::size_t i = 0; i < all; ++i) order[i] = i;
    util::Rng rng(util::derive_seed(options.seed, task_stream(task)));
    rng.shuffle(order);
    order.resize(take);
    std::sort(order.begin(), order.end());

    for (const std::size_t flat : order) {
      const rollout::Trajectory& good = *successes[flat / failures.size()];
      const rollout::Trajectory& bad = *failures[flat % failures.size()];
      PreferencePair pair;
      pair.prompt = good.system_prompt;
      const ChatSample chosen = render_chat(good);
      const ChatSample rejected = render_chat(bad);
      pair.chosen.assign(chosen.messages.begin() + 1, chosen.messages.end());
      pair.rejected.assign(rejected.messages.begin() + 1, rejected.messages.end());
      pair.meta["task"] = task;
      pair.meta["env"] = envs::to_string(good.env_kind);
      pair.meta["chosen_policy"] = good.policy_name;
      pair.meta["rejected_policy"] = bad.policy_name;
      pair.meta["chosen_seed"] = static_cast<std::int64_t>(good.seed);
      pair.meta["rejected_seed"] = static_cast<std::int64_t>(bad.seed);
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

ExportStats export_dpo(const std::vector<rollout::Trajectory>& trajectories,
                       const std::string& path, const ExportOptions& options) {
  ExportStats stats;
  const std::vector<PreferencePair> pairs =
      make_preference_pairs(trajectories, options, &stats);
  std::string out;
  for (const auto& pair : pairs) {
    if (pair_chars(pair) > options.max_chars) {
      stats.dropped_overlength += 1;
      continue;
    }
    out += preference_pair_json(pair);
    out += "\n";
    stats.written += 1;
  }
  util::atomic_write(path, out);
  return stats;
}

}  // namespace catforge::data
