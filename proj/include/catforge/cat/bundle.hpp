#pragma once

#include <string>
#include <vector>

#include "catforge/ctl/value.hpp"
#include "catforge/envs/suite.hpp"

namespace catforge::cat {

using ctl::Value;

// A self-contained task: what to do, how to grade it, one program that
// earns the reward, and at least three that must not.
struct CatBundle {
  std::string instruction;
  std::string verify;                  // CTL source, read-only tools only
  std::string solution;                // CTL source
  std::vector<std::string> failures;   // CTL sources, >= 3 for a full bundle
  envs::EnvKind env_kind = envs::EnvKind::Retail;
  std::uint64_t base_seed = 0;
  Value::Map metadata;                 // free-form; "scale" selects world size
};

// World size is carried in metadata so bundles stay a flat record.
envs::Scale bundle_scale(const CatBundle& bundle);

// One JSON object per line: {instruction, verify, solution, failures[],
// env_kind, base_seed, metadata}.
std::string to_json_line(const CatBundle& bundle);
CatBundle from_json_line(const std::string& line);  // throws std::runtime_error

std::vector<CatBundle> load_bundles(const std::string& path);
void save_bundles(const std::string& path, const std::vector<CatBundle>& bundles);

}  // namespace catforge::cat
