#include "catforge/rollout/rollout.hpp"

#include <cctype>
#include <sstream>

#include "catforge/ctl/errors.hpp"
#include "catforge/ctl/interpreter.hpp"
#include "catforge/ctl/parser.hpp"
#include "catforge/env/state.hpp"
#include "catforge/rollout/user_sim.hpp"
#include "catforge/util/hash.hpp"
#include "catforge/util/io.hpp"
#include "json.hpp"

namespace catforge::rollout {

namespace {

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

const char* marker_of(PolicyStep::Kind kind) {
  switch (kind) {
    case PolicyStep::Kind::Code: return "ACTION";
    case PolicyStep::Kind::Message: return "MESSAGE";
    case PolicyStep::Kind::Answer: return "ANSWER";
  }
  return "ACTION";
}

std::string task_ref_of(const CatBundle& bundle) {
  auto it = bundle.metadata.find("task_id");
  if (it != bundle.metadata.end() && it->second.is_str()) return it->second.as_str();
  return util::sha256_hex(cat::to_json_line(bundle)).substr(0, 12);
}

std::string observation_entry(const env::Observation& obs) {
  return "[" + std::string(env::to_string(obs.kind)) + "] " + obs.text();
}

}  // namespace

std::string render_markup(const PolicyStep& step) {
  const char* marker = marker_of(step.kind);
  return std::string(marker) + "\n" + step.text + "\nEND " + marker;
}

std::optional<PolicyStep> parse_markup(const std::string& content) {
  const std::vector<std::string> lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string head = trim_copy(lines[i]);
    PolicyStep::Kind kind;
    if (head == "ACTION") {
      kind = PolicyStep::Kind::Code;
    } else if (head == "MESSAGE") {
      kind = PolicyStep::Kind::Message;
    } else if (head == "ANSWER") {
      kind = PolicyStep::Kind::Answer;
    } else {
      continue;  // leading thought text
    }
    const std::string closer = "END " + head;
    // Last closer wins so bodies may themselves mention END lines.
    std::size_t end = lines.size();
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (trim_copy(lines[j]) == closer) end = j;
    }
    if (end == lines.size()) return std::nullopt;
    std::string body;
    for (std::size_t j = i + 1; j < end; ++j) {
      if (j > i + 1) body += "\n";
      body += lines[j];
    }
    return PolicyStep{kind, trim_copy(body)};
  }
  return std::nullopt;
}

const char* to_string(Trajectory::End end) {
  switch (end) {
    case Trajectory::End::AnswerSubmitted: return "answer_submitted";
    case Trajectory::End::StopToken: return "stop_token";
    case Trajectory::End::Exhausted: return "exhausted";
    case Trajectory::End::Error: return "error";
  }
  return "error";
}

std::string executor_system_prompt(const envs::Environment& env,
                                   const std::string& instruction) {
  std::ostringstream out;
  out << "You are the service agent at the " << env.name() << " desk.\n";
  out << env.description() << "\n\nTOOLS\n";
  out << env::render_tool_docs(env.tools(), env::EpisodeMode::Executor);
  out << "\nTASK\n" << instruction << "\n\n";
  out << "Each turn, reply with exactly one block:\n";
  out << "ACTION\n<program>\nEND ACTION  runs a program against the tools;\n";
  out << "MESSAGE\n<text>\nEND MESSAGE  says something to the user;\n";
  out << "ANSWER\n<text>\nEND ANSWER  submits the final answer and ends the episode.\n";
  return out.str();
}

std::string challenger_system_prompt(const envs::Environment& env) {
  std::ostringstream out;
  out << "You design tasks for the " << env.name() << " desk.\n";
  out << env.description() << "\n\nTOOLS\n";
  out << env::render_tool_docs(env.tools(), env::EpisodeMode::Challenger);
  out << "\nExplore the world with ACTION blocks:\nACTION\n<program>\nEND ACTION\n";
  out << "When ready, submit one ANSWER block containing:\n";
  out << "<instruction>task for the agent, naming every id it needs</instruction>\n";
  out << "<evaluation_function>program returning true only when the task is done; "
         "it may read the variable answer and must call only read-only tools"
         "</evaluation_function>\n";
  out << "<solution>program that completes the task</solution>\n";
  out << "<failure_case>program that must not pass the evaluation</failure_case> "
         "(give at least three)\n";
  return out.str();
}

Trajectory run_executor_episode(const CatBundle& bundle, Policy& policy,
                                std::uint64_t seed, const RolloutOptions& options) {
  const auto env = envs::make_environment(bundle.env_kind, cat::bundle_scale(bundle));
  env::EnvState state = env->reset(bundle.base_seed);

  Trajectory traj;
  traj.task_ref = task_ref_of(bundle);
  traj.env_kind = bundle.env_kind;
  traj.seed = seed;
  traj.policy_name = policy.name();
  traj.system_prompt = executor_system_prompt(*env, bundle.instruction);

  policy.reseed(seed);
  const UserSimScript sim(bundle.instruction);
  const env::EpisodeConfig config{options.max_steps, seed, env::EpisodeMode::Executor};

  Transcript transcript;
  transcript.push_back({"system", traj.system_prompt});

  while (true) {
    PolicyStep step;
    try {
      step = policy.next_action(transcript);
    } catch (const PolicyTransportError&) {
      traj.terminated_by = Trajectory::End::Error;
      break;
    }
    if (step.kind == PolicyStep::Kind::Answer) {
      traj.final_answer = trim_copy(step.text);
      traj.terminated_by = Trajectory::End::AnswerSubmitted;
      break;
    }
    env::AgentAction action;
    if (step.kind == PolicyStep::Kind::Code) {
      action = env::CodeAction{step.text};
    } else {
      action = env::MessageAction{step.text};
    }
    env::Observation obs;
    try {
      obs = env::apply_action(*env, state, action, config, sim);
    } catch (const env::EpisodeExhausted&) {
      traj.terminated_by = Trajectory::End::Exhausted;
      break;
    }
    const std::string obs_text = obs.text();
    traj.steps.push_back({step, obs_text, env::to_string(obs.kind)});
    transcript.push_back({"assistant", render_markup(step)});
    transcript.push_back({"user", observation_entry(obs)});
    if (step.kind == PolicyStep::Kind::Message &&
        obs_text.find("###STOP###") != std::string::npos) {
      traj.terminated_by = Trajectory::End::StopToken;
      break;
    }
  }

  try {
    const ctl::Program verify = ctl::parse(bundle.verify);
    traj.reward = cat::run_verify(*env, state, verify, traj.final_answer).verdict ? 1 : 0;
  } catch (const ctl::SyntaxError&) {
    traj.reward = 0;
  }
  if (options.keep_snapshot) traj.final_snapshot = env::snapshot(state);
  return traj;
}

int recompute_reward(const CatBundle& bundle, const Trajectory& trajectory) {
  if (trajectory.final_snapshot.empty()) {
    throw std::runtime_error("recompute_reward: trajectory carries no snapshot");
  }
  const auto env = envs::make_environment(bundle.env_kind, cat::bundle_scale(bundle));
  env::EnvState state = env::restore(trajectory.final_snapshot);
  try {
    const ctl::Program verify = ctl::parse(bundle.verify);
    return cat::run_verify(*env, state, verify, trajectory.final_answer).verdict ? 1 : 0;
  } catch (const ctl::SyntaxError&) {
    return 0;
  }
}

namespace {

// Collects the bodies of every <tag>...</tag> pair; unterminated tags are
// reported by throwing.
std::vector<std::string> grab_tag(const std::string& text, const std::string& tag) {
  std::vector<std::string> bodies;
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  std::size_t at = 0;
  while (true) {
    const std::size_t b = text.find(open, at);
    if (b == std::string::npos) break;
    const std::size_t e = text.find(close, b + open.size());
    if (e == std::string::npos) throw MalformedAnswer("unterminated <" + tag + "> tag");
    bodies.push_back(trim_copy(text.substr(b + open.size(), e - (b + open.size()))));
    at = e + close.size();
  }
  return bodies;
}

std::string grab_one(const std::string& text, const std::string& tag) {
  const auto bodies = grab_tag(text, tag);
  if (bodies.empty()) throw MalformedAnswer("missing <" + tag + "> tag");
  if (bodies.size() > 1) throw MalformedAnswer("duplicated <" + tag + "> tag");
  return bodies.front();
}

}  // namespace

CatBundle parse_cat_answer(const std::string& text, envs::EnvKind kind,
                           std::uint64_t base_seed) {
  CatBundle bundle;
  bundle.instruction = grab_one(text, "instruction");
  bundle.verify = grab_one(text, "evaluation_function");
  bundle.solution = grab_one(text, "solution");
  bundle.failures = grab_tag(text, "failure_case");
  bundle.env_kind = kind;
  bundle.base_seed = base_seed;
  return bundle;
}

CatBundle run_challenger_episode(envs::EnvKind kind, Policy& policy, std::uint64_t seed,
                                 envs::Scale scale, const RolloutOptions& options) {
  const auto env = envs::make_environment(kind, scale);
  env::EnvState state = env->reset(seed);
  policy.reseed(seed);
  const env::EpisodeConfig config{options.max_steps, seed, env::EpisodeMode::Challenger};

  Transcript transcript;
  transcript.push_back({"system", challenger_system_prompt(*env)});

  int format_left = options.format_retries;
  while (true) {
    const PolicyStep step = policy.next_action(transcript);
    if (step.kind == PolicyStep::Kind::Answer) {
      transcript.push_back({"assistant", render_markup(step)});
      try {
        CatBundle bundle = parse_cat_answer(step.text, kind, seed);
        bundle.metadata["scale"] = envs::to_string(scale);
        bundle.metadata["challenger"] = policy.name();
        return bundle;
      } catch (const MalformedAnswer& e) {
        if (format_left-- > 0) {
          transcript.push_back(
              {"user", std::string("Invalid answer: ") + e.what() + ". Resubmit the full ANSWER block."});
          continue;
        }
        throw;
      }
    }
    if (step.kind == PolicyStep::Kind::Message) {
      if (format_left-- > 0) {
        transcript.push_back({"assistant", render_markup(step)});
        transcript.push_back(
            {"user", "There is no user here. Explore with ACTION or finish with ANSWER."});
        continue;
      }
      throw MalformedAnswer("MESSAGE is not a challenger action");
    }
    env::Observation obs;
    try {
      obs = env::apply_action(*env, state, env::CodeAction{step.text}, config);
    } catch (const env::EpisodeExhausted&) {
      throw ExplorationExhausted("no ANSWER within " + std::to_string(options.max_steps) +
                                 " exploration actions");
    }
    transcript.push_back({"assistant", render_markup(step)});
    transcript.push_back({"user", observation_entry(obs)});
  }
}

std::optional<Trajectory::End> parse_end(const std::string& text) {
  if (text == "answer_submitted") return Trajectory::End::AnswerSubmitted;
  if (text == "stop_token") return Trajectory::End::StopToken;
  if (text == "exhausted") return Trajectory::End::Exhausted;
  if (text == "error") return Trajectory::End::Error;
  return std::nullopt;
}

namespace {

const char* to_string(PolicyStep::Kind kind) {
  switch (kind) {
    case PolicyStep::Kind::Code: return "code";
    case PolicyStep::Kind::Message: return "message";
    case PolicyStep::Kind::Answer: return "answer";
  }
  return "code";
}

std::optional<PolicyStep::Kind> parse_step_kind(const std::string& text) {
  if (text == "code") return PolicyStep::Kind::Code;
  if (text == "message") return PolicyStep::Kind::Message;
  if (text == "answer") return PolicyStep::Kind::Answer;
  return std::nullopt;
}

}  // namespace

std::string trajectory_json(const Trajectory& trajectory) {
  nlohmann::json j;
  j["task"] = trajectory.task_ref;
  j["env"] = envs::to_string(trajectory.env_kind);
  j["seed"] = trajectory.seed;
  j["system_prompt"] = trajectory.system_prompt;
  nlohmann::json steps = nlohmann::json::array();
  for (const Trajectory::Step& step : trajectory.steps) {
    steps.push_back({{"kind", to_string(step.action.kind)},
                     {"text", step.action.text},
                     {"observation", step.observation},
                     {"obs_kind", step.obs_kind}});
  }
  j["steps"] = std::move(steps);
  j["final_answer"] = trajectory.final_answer;
  j["terminated_by"] = to_string(trajectory.terminated_by);
  j["reward"] = trajectory.reward;
  j["policy"] = trajectory.policy_name;
  if (!trajectory.final_snapshot.empty()) j["snapshot"] = trajectory.final_snapshot;
  return j.dump();
}

Trajectory trajectory_from_json(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("trajectory line is not a JSON object");
  }
  for (const char* field : {"task", "env", "seed", "system_prompt", "steps",
                            "final_answer", "terminated_by", "reward", "policy"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(std::string("trajectory line missing field '") + field + "'");
    }
  }
  Trajectory trajectory;
  trajectory.task_ref = j["task"].get<std::string>();
  auto kind = envs::parse_env_kind(j["env"].get<std::string>());
  if (!kind) {
    throw std::runtime_error("unknown env '" + j["env"].get<std::string>() + "'");
  }
  trajectory.env_kind = *kind;
  trajectory.seed = j["seed"].get<std::uint64_t>();
  trajectory.system_prompt = j["system_prompt"].get<std::string>();
  if (!j["steps"].is_array()) throw std::runtime_error("steps is not an array");
  for (const auto& s : j["steps"]) {
    Trajectory::Step step;
    auto step_kind = parse_step_kind(s.at("kind").get<std::string>());
    if (!step_kind) {
      throw std::runtime_error("unknown step kind '" + s.at("kind").get<std::string>() + "'");
    }
    step.action.kind = *step_kind;
    step.action.text = s.at("text").get<std::string>();
    step.observation = s.at("observation").get<std::string>();
    step.obs_kind = s.at("obs_kind").get<std::string>();
    trajectory.steps.push_back(std::move(step));
  }
  trajectory.final_answer = j["final_answer"].get<std::string>();
  auto end = parse_end(j["terminated_by"].get<std::string>());
  if (!end) {
    throw std::runtime_error("unknown terminated_by '" +
                             j["terminated_by"].get<std::string>() + "'");
  }
  trajectory.terminated_by = *end;
  trajectory.reward = j["reward"].get<int>();
  trajectory.policy_name = j["policy"].get<std::string>();
  if (j.contains("snapshot")) trajectory.final_snapshot = j["snapshot"].get<std::string>();
  return trajectory;
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::vector<Trajectory> trajectories;
  std::size_t line_no = 0;
  for (const std::string& line : util::read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trajectories.push_back(trajectory_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trajectories;
}

void save_trajectories(const std::string& path, const std::vector<Trajectory>& trajectories) {
  std::string out;
  for (const Trajectory& trajectory : trajectories) {
    out += trajectory_json(trajectory);
    out += "\n";
  }
  util::atomic_write(path, out);
}

}  // namespace catforge::rollout
