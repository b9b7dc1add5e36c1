#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "catforge/ctl/value.hpp"

namespace catforge::env {

using ctl::Value;

// Whole world state: named record tables plus episode bookkeeping. The
// digest covers tables and rng_seed only, so read-only tool calls and log
// appends never change it.
struct EnvState {
  std::map<std::string, std::map<std::string, Value>> tables;
  std::uint64_t rng_seed = 0;
  std::int64_t step_count = 0;
  std::vector<Value> episode_log;  // append-only; each entry {"kind","text"}
};

class CorruptSnapshot : public std::runtime_error {
 public:
  explicit CorruptSnapshot(const std::string& detail)
      : std::runtime_error("CorruptSnapshot: " + detail) {}
};

// 256-bit hex digest of the canonical serialization: tables sorted by name,
// records by primary key, map keys lexicographic.
std::string digest(const EnvState& state);

// Versioned, restorable dump (header "CATFORGE-ENV v1").
std::string snapshot(const EnvState& state);
EnvState restore(const std::string& bytes);

void log_event(EnvState& state, const std::string& kind, const std::string& text);

// Record helpers; missing table/key throws std::out_of_range.
const Value& get_record(const EnvState& state, const std::string& table, const std::string& key);
bool has_record(const EnvState& state, const std::string& table, const std::string& key);

}  // namespace catforge::env
