#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "catforge/rollout/rollout.hpp"

namespace catforge::rollout {

// Replays a known-good program, then submits the resulting observation as
// the answer. Works from the transcript alone.
class OracleReplay : public Policy {
 public:
  explicit OracleReplay(std::string solution) : solution_(std::move(solution)) {}
  PolicyStep next_action(const Transcript& transcript) override;
  std::string name() const override { return "oracle"; }

 private:
  std::string solution_;
};

// Plays a fixed list of steps; once exhausted it submits an empty answer.
class ScriptedPolicy : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<PolicyStep> steps) : steps_(std::move(steps)) {}
  PolicyStep next_action(const Transcript& transcript) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<PolicyStep> steps_;
};

// Calls visible tools with no arguments, in seeded order, and never
// answers. Tool names are scraped from the system prompt's docs block.
class RandomToolPolicy : public Policy {
 public:
  explicit RandomToolPolicy(std::uint64_t seed) : seed_(seed) {}
  PolicyStep next_action(const Transcript& transcript) override;
  std::string name() const override { return "random"; }
  void reseed(std::uint64_t seed) override { seed_ = seed; }

 private:
  std::uint64_t seed_;
};

struct RemoteChatConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  double temperature = 0.0;
  std::int64_t max_tokens = 1024;
  std::string auth_token;  // sent as a bearer token when nonempty
  int max_attempts = 3;
  int backoff_ms = 100;  // doubles per retry
  int timeout_seconds = 60;
};

// OpenAI-style chat endpoint client. Throws PolicyTransportError after the
// retry budget is spent.
class RemoteChatPolicy : public Policy {
 public:
  explicit RemoteChatPolicy(RemoteChatConfig config) : config_(std::move(config)) {}
  PolicyStep next_action(const Transcript& transcript) override;
  std::string name() const override { return "remote:" + config_.model; }
  void reseed(std::uint64_t seed) override { seed_ = seed; }

 private:
  RemoteChatConfig config_;
  std::uint64_t seed_ = 0;
};

// Names scraped from "- name(..." lines of a tool docs block.
std::vector<std::string> tool_names_from_prompt(const std::string& system_prompt);

}  // namespace catforge::rollout
