#include "catforge/envs/suite.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "envs_internal.hpp"

namespace catforge::envs {

const char* to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::Retail: return "retail";
    case EnvKind::Airline: return "airline";
    case EnvKind::Calculation: return "calculation";
    case EnvKind::Web: return "web";
  }
  return "unknown";
}

const char* to_string(Scale scale) {
  return scale == Scale::Small ? "small" : "medium";
}

std::optional<EnvKind> parse_env_kind(const std::string& text) {
  if (text == "retail") return EnvKind::Retail;
  if (text == "airline") return EnvKind::Airline;
  if (text == "calculation") return EnvKind::Calculation;
  if (text == "web") return EnvKind::Web;
  return std::nullopt;
}

std::optional<Scale> parse_scale(const std::string& text) {
  if (text == "small") return Scale::Small;
  if (text == "medium") return Scale::Medium;
  return std::nullopt;
}

std::unique_ptr<Environment> make_environment(EnvKind kind, Scale scale) {
  switch (kind) {
    case EnvKind::Retail: return make_retail_env(scale);
    case EnvKind::Airline: return make_airline_env(scale);
    case EnvKind::Calculation: return make_calculation_env(scale);
    case EnvKind::Web: return make_web_env(scale);
  }
  return nullptr;
}

EnvState generate_world(EnvKind kind, std::uint64_t seed, Scale scale) {
  return make_environment(kind, scale)->reset(seed);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fold(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& s, double* out) {
  std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

bool match_answer(const std::string& answer, const AnswerTask& task) {
  if (task.match_mode == AnswerTask::Mode::Numeric) {
    double got = 0.0;
    double want = 0.0;
    if (!parse_number(answer, &got)) return false;
    if (!parse_number(task.expected_answer, &want)) return false;
    return std::fabs(got - want) <= 1e-6;
  }
  return fold(trim(answer)) == fold(trim(task.expected_answer));
}

std::vector<Fact> world_facts(const EnvState& state) {
  std::vector<Fact> facts;
  auto it = state.tables.find("facts");
  if (it == state.tables.end()) return facts;
  for (const auto& [id, record] : it->second) {
    const auto& map = record.as_map();
    Fact fact;
    fact.id = id;
    fact.question = map.at("question").as_str();
    fact.task.expected_answer = map.at("expected").as_str();
    fact.task.match_mode = map.at("mode").as_str() == "numeric"
                               ? AnswerTask::Mode::Numeric
                               : AnswerTask::Mode::ExactString;
    facts.push_back(std::move(fact));
  }
  return facts;
}

}  // namespace catforge::envs
