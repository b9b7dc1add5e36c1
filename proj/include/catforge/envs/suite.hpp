#pragma once

#include <memory>
#include <optional>
#include <string>

#include "catforge/env/episode.hpp"

namespace catforge::envs {

using env::Environment;
using env::EnvState;
using env::Value;

enum class EnvKind { Retail, Airline, Calculation, Web };
enum class Scale { Small, Medium };

const char* to_string(EnvKind kind);
const char* to_string(Scale scale);
std::optional<EnvKind> parse_env_kind(const std::string& text);
std::optional<Scale> parse_scale(const std::string& text);

// Registries are built once per Environment; reset() regenerates the world
// deterministically from (kind, seed, scale).
std::unique_ptr<Environment> make_environment(EnvKind kind, Scale scale = Scale::Small);
EnvState generate_world(EnvKind kind, std::uint64_t seed, Scale scale);

struct AnswerTask {
  std::string expected_answer;
  enum class Mode { Numeric, ExactString } match_mode = Mode::ExactString;
};

// Numeric: both sides parse as numbers, absolute tolerance 1e-6.
// Exact: trimmed, ASCII-case-folded equality.
bool match_answer(const std::string& answer, const AnswerTask& task);

// Answer-mode worlds carry a hidden "facts" table; each fact is a
// question/answer pair a challenger can turn into a task.
struct Fact {
  std::string id;
  std::string question;
  AnswerTask task;
};
std::vector<Fact> world_facts(const EnvState& state);

}  // namespace catforge::envs
