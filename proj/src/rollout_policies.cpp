#include "catforge/rollout/policies.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "catforge/util/rng.hpp"

namespace catforge::rollout {

namespace {

std::size_t assistant_turns(const Transcript& transcript) {
  std::size_t n = 0;
  for (const auto& entry : transcript) {
    if (entry.role == "assistant") ++n;
  }
  return n;
}

const std::string* last_user_entry(const Transcript& transcript) {
  for (auto it = transcript.rbegin(); it != transcript.rend(); ++it) {
    if (it->role == "user") return &it->content;
  }
  return nullptr;
}

// Observations land in the transcript as "[kind] text".
std::string strip_observation_tag(const std::string& entry) {
  if (!entry.empty() && entry.front() == '[') {
    const std::size_t close = entry.find("] ");
    if (close != std::string::npos) return entry.substr(close + 2);
  }
  return entry;
}

}  // namespace

PolicyStep OracleReplay::next_action(const Transcript& transcript) {
  if (assistant_turns(transcript) == 0) {
    return {PolicyStep::Kind::Code, solution_};
  }
  const std::string* obs = last_user_entry(transcript);
  return {PolicyStep::Kind::Answer, obs ? strip_observation_tag(*obs) : ""};
}

PolicyStep ScriptedPolicy::next_action(const Transcript& transcript) {
  const std::size_t k = assistant_turns(transcript);
  if (k < steps_.size()) return steps_[k];
  return {PolicyStep::Kind::Answer, ""};
}

std::vector<std::string> tool_names_from_prompt(const std::string& system_prompt) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos < system_prompt.size()) {
    std::size_t eol = system_prompt.find('\n', pos);
    if (eol == std::string::npos) eol = system_prompt.size();
    const std::string line = system_prompt.substr(pos, eol - pos);
    if (line.rfind("- ", 0) == 0) {
      const std::size_t paren = line.find('(');
      if (paren != std::string::npos && paren > 2) {
        names.push_back(line.substr(2, paren - 2));
      }
    }
    pos = eol + 1;
  }
  return names;
}

PolicyStep RandomToolPolicy::next_action(const Transcript& transcript) {
  std::vector<std::string> names;
  if (!transcript.empty() && transcript.front().role == "system") {
    names = tool_names_from_prompt(transcript.front().content);
  }
  const std::size_t k = assistant_turns(transcript);
  if (names.empty()) return {PolicyStep::Kind::Code, "x = " + std::to_string(k)};
  util::Rng rng(util::derive_seed(seed_, k));
  return {PolicyStep::Kind::Code, rng.pick(names) + "()"};
}

PolicyStep RemoteChatPolicy::next_action(const Transcript& transcript) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& entry : transcript) {
    messages.push_back({{"role", entry.role}, {"content", entry.content}});
  }

  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_seconds);
  client.set_read_timeout(config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.auth_token.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.auth_token);
  }

  const int format_retries = 2;
  std::string last_error = "no attempt made";
  for (int format_round = 0; format_round <= format_retries; ++format_round) {
    nlohmann::json body = {
        {"model", config_.model},
        {"messages", messages},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_tokens},
        {"seed", seed_},
    };
    std::string content;
    bool got_reply = false;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
      }
      auto res = client.Post(config_.path, headers, body.dump(), "application/json");
      if (!res) {
        last_error = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "http status " + std::to_string(res->status);
        continue;
      }
      try {
        const auto reply = nlohmann::json::parse(res->body);
        content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        got_reply = true;
        break;
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("bad response body: ") + e.what();
      }
    }
    if (!got_reply) throw PolicyTransportError(last_error);
    if (auto step = parse_markup(content)) return *step;
    // Malformed markup: show the model its reply and ask again.
    messages.push_back({{"role", "assistant"}, {"content", content}});
    messages.push_back({{"role", "user"},
                        {"content", "Invalid format. Reply with exactly one ACTION, "
                                    "MESSAGE, or ANSWER block closed by its END line."}});
    last_error = "malformed reply after format retries";
  }
  throw PolicyTransportError(last_error);
}

}  // namespace catforge::rollout
