#include "catforge/cat/bundle.hpp"

#include <stdexcept>

#include "catforge/util/io.hpp"
#include "catforge/util/jsonv.hpp"
#include "json.hpp"

namespace catforge::cat {

envs::Scale bundle_scale(const CatBundle& bundle) {
  auto it = bundle.metadata.find("scale");
  if (it != bundle.metadata.end() && it->second.is_str()) {
    if (auto scale = envs::parse_scale(it->second.as_str())) return *scale;
  }
  return envs::Scale::Small;
}

std::string to_json_line(const CatBundle& bundle) {
  nlohmann::json j;
  j["instruction"] = bundle.instruction;
  j["verify"] = bundle.verify;
  j["solution"] = bundle.solution;
  j["failures"] = bundle.failures;
  j["env_kind"] = envs::to_string(bundle.env_kind);
  j["base_seed"] = bundle.base_seed;
  j["metadata"] = util::value_to_json(Value(bundle.metadata));
  return j.dump();
}

CatBundle from_json_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("bundle line is not a JSON object");
  }
  for (const char* field : {"instruction", "verify", "solution", "failures",
                            "env_kind", "base_seed"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(std::string("bundle line missing field '") + field + "'");
    }
  }
  CatBundle bundle;
  if (!j["instruction"].is_string() || !j["verify"].is_string() ||
      !j["solution"].is_string() || !j["failures"].is_array() ||
      !j["env_kind"].is_string() || !j["base_seed"].is_number()) {
    throw std::runtime_error("bundle line has a wrongly typed field");
  }
  bundle.instruction = j["instruction"].get<std::string>();
  bundle.verify = j["verify"].get<std::string>();
  bundle.solution = j["solution"].get<std::string>();
  for (const auto& f : j["failures"]) {
    if (!f.is_string()) throw std::runtime_error("failure entry is not a string");
    bundle.failures.push_back(f.get<std::string>());
  }
  auto kind = envs::parse_env_kind(j["env_kind"].get<std::string>());
  if (!kind) {
    throw std::runtime_error("unknown env_kind '" + j["env_kind"].get<std::string>() + "'");
  }
  bundle.env_kind = *kind;
  bundle.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("metadata")) {
    Value metadata = util::json_to_value(j["metadata"]);
    if (!metadata.is_map()) throw std::runtime_error("metadata is not an object");
    bundle.metadata = metadata.as_map();
  }
  return bundle;
}

std::vector<CatBundle> load_bundles(const std::string& path) {
  std::vector<CatBundle> bundles;
  std::size_t line_no = 0;
  for (const std::string& line : util::read_lines(path)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      bundles.push_back(from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return bundles;
}

void save_bundles(const std::string& path, const std::vector<CatBundle>& bundles) {
  std::string out;
  for (const CatBundle& bundle : bundles) {
    out += to_json_line(bundle);
    out += "\n";
  }
  util::atomic_write(path, out);
}

}  // namespace catforge::cat
