#pragma once

#include <string>
#include <utility>
#include <vector>

#include "catforge/env/episode.hpp"

namespace catforge::rollout {

// Deterministic keyword-rule user: reveals only facts present in the task
// instruction, refuses anything else it is asked, and emits the stop token
// when the agent stops asking questions.
class UserSimScript {
 public:
  explicit UserSimScript(const std::string& instruction);

  std::string operator()(const std::string& agent_message, env::EnvState& state) const;

  // keyword -> value pairs extracted from the instruction, reveal order.
  const std::vector<std::pair<std::string, std::string>>& facts() const { return facts_; }

 private:
  std::vector<std::pair<std::string, std::string>> facts_;
};

}  // namespace catforge::rollout
