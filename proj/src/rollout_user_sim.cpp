#include "catforge/rollout/user_sim.hpp"

#include <cctype>
#include <regex>
#include <set>

namespace catforge::rollout {

namespace {

std::string fold(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Extractor {
  const char* keyword;
  const char* pattern;
};

// Scan order fixes the reveal order; values are facts the user can repeat
// because the instruction gave them to the user in the first place.
const Extractor kExtractors[] = {
    {"order", R"(#W\d+)"},
    {"flight", R"(\bHAT\d{3}\b)"},
    {"payment", R"(\b(?:paypal|credit_card|gift_card)_\d+\b)"},
    {"user id", R"(\b[a-z]+_[a-z]+_\d{3}\b)"},
    {"email", R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"},
    {"item", R"(\bI\d{4}\b)"},
    {"product", R"(\bP\d{4}\b)"},
    {"date", R"(\b\d{4}-\d{2}-\d{2}\b)"},
    {"zip", R"(\b\d{5}\b)"},
    {"reservation", R"(\b[A-Z0-9]{6}\b)"},
};

bool reservation_shaped(const std::string& token) {
  bool digit = false, alpha = false;
  for (char c : token) {
    if (std::isdigit(static_cast<unsigned char>(c))) digit = true;
    if (std::isupper(static_cast<unsigned char>(c))) alpha = true;
  }
  return digit && alpha;
}

}  // namespace

UserSimScript::UserSimScript(const std::string& instruction) {
  std::set<std::string> seen;
  for (const auto& ex : kExtractors) {
    const std::regex re(ex.pattern);
    std::string values;
    for (auto it = std::sregex_iterator(instruction.begin(), instruction.end(), re);
         it != std::sregex_iterator(); ++it) {
      const std::string token = it->str();
      if (std::string(ex.keyword) == "reservation" && !reservation_shaped(token)) continue;
      if (!seen.insert(token).second) continue;
      if (!values.empty()) values += ", ";
      values += token;
    }
    if (!values.empty()) facts_.emplace_back(ex.keyword, values);
  }
}

std::string UserSimScript::operator()(const std::string& agent_message,
                                      env::EnvState&) const {
  const std::string lower = fold(agent_message);
  if (lower.find('?') == std::string::npos) {
    // The agent made a statement; the user has nothing left to add.
    return "###STOP###";
  }
  std::string out;
  for (const auto& [keyword, values] : facts_) {
    if (lower.find(keyword) == std::string::npos) continue;
    if (!out.empty()) out += "; ";
    out += std::string(keyword) + ": " + values;
  }
  if (!out.empty()) return out;
  return "I'm sorry, I don't have that information.";
}

}  // namespace catforge::rollout
