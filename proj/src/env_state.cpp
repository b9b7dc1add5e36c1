#include "catforge/env/state.hpp"

#include "catforge/util/hash.hpp"
#include "catforge/util/jsonv.hpp"

namespace catforge::env {

namespace {

constexpr const char* kHeader = "CATFORGE-ENV v1";

nlohmann::json tables_to_json(const EnvState& state) {
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& [name, records] : state.tables) {
    nlohmann::json table = nlohmann::json::object();
    for (const auto& [key, record] : records) {
      table[key] = util::value_to_json(record);
    }
    tables[name] = std::move(table);
  }
  return tables;
}

}  // namespace

std::string digest(const EnvState& state) {
  nlohmann::json body;
  body["rng_seed"] = state.rng_seed;
  body["tables"] = tables_to_json(state);
  return util::sha256_hex(body.dump());
}

std::string snapshot(const EnvState& state) {
  nlohmann::json body;
  body["rng_seed"] = state.rng_seed;
  body["step_count"] = state.step_count;
  body["tables"] = tables_to_json(state);
  nlohmann::json log = nlohmann::json::array();
  for (const Value& event : state.episode_log) log.push_back(util::value_to_json(event));
  body["episode_log"] = std::move(log);
  return std::string(kHeader) + "\n" + body.dump() + "\n";
}

EnvState restore(const std::string& bytes) {
  std::size_t nl = bytes.find('\n');
  if (nl == std::string::npos || bytes.substr(0, nl) != kHeader) {
    throw CorruptSnapshot("missing or wrong header");
  }
  nlohmann::json body = nlohmann::json::parse(bytes.substr(nl + 1), nullptr, false);
  if (body.is_discarded() || !body.is_object()) throw CorruptSnapshot("body is not JSON");
  try {
    EnvState state;
    state.rng_seed = body.at("rng_seed").get<std::uint64_t>();
    state.step_count = body.at("step_count").get<std::int64_t>();
    const auto& tables = body.at("tables");
    if (!tables.is_object()) throw CorruptSnapshot("tables is not an object");
    for (const auto& [name, table] : tables.items()) {
      if (!table.is_object()) throw CorruptSnapshot("table is not an object");
      for (const auto& [key, record] : table.items()) {
        state.tables[name][key] = util::json_to_value(record);
      }
    }
    for (const auto& event : body.at("episode_log")) {
      state.episode_log.push_back(util::json_to_value(event));
    }
    return state;
  } catch (const CorruptSnapshot&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptSnapshot(e.what());
  }
}

void log_event(EnvState& state, const std::string& kind, const std::string& text) {
  state.episode_log.push_back(Value(Value::Map{{"kind", Value(kind)}, {"text", Value(text)}}));
}

const Value& get_record(const EnvState& state, const std::string& table, const std::string& key) {
  return state.tables.at(table).at(key);
}

bool has_record(const EnvState& state, const std::string& table, const std::string& key) {
  auto it = state.tables.find(table);
  return it != state.tables.end() && it->second.count(key) > 0;
}

}  // namespace catforge::env
