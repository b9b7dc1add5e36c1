#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "catforge/cat/bundle.hpp"

namespace catforge::cat {

enum class RejectClass {
  Unparsable,
  VerifyUnrunnable,
  SolutionFails,
  FailurePasses,
  NoopPasses,
  VerifyMutates,
};
const char* to_string(RejectClass c);

struct Verdict {
  bool accepted = false;
  std::optional<RejectClass> reject_class;
  std::vector<std::string> diagnostics;  // one line per executed check
};

// The ablation ladder: each variant runs a superset of the previous one's
// checks, so accepted(Full) is a subset of accepted(VerifySolution) is a
// subset of accepted(VerifyOnly).
enum class FilterVariant { VerifyOnly, VerifySolution, Full };
const char* to_string(FilterVariant v);

struct FilterStats {
  std::int64_t total = 0;
  std::int64_t accepted = 0;
  double pass_rate = 0.0;  // accepted/total; 0 when total is 0
  std::map<std::string, std::int64_t> reject_counts;  // zero-filled per class
  std::map<std::int64_t, std::int64_t> difficulty_histogram;  // accepted only
};

// Checks run in a fixed order, each from a fresh world reset, and the
// verdict names the first check that failed: parse, no-op (verify must not
// pass on the untouched world), solution passes verify, no failure passes
// verify, verify calls no mutating tool.
Verdict validate(const CatBundle& bundle, FilterVariant variant = FilterVariant::Full);

// Lexical statement count of the solution (statements inside if/for bodies
// count once each). Throws ctl::SyntaxError when the solution does not parse.
std::int64_t difficulty(const CatBundle& bundle);

std::pair<std::vector<CatBundle>, FilterStats> filter_batch(
    const std::vector<CatBundle>& bundles, FilterVariant variant = FilterVariant::Full,
    int workers = 1);

// Single JSON object, stable field order; lets a filtering run hand its
// stats to a later reporting step.
std::string filter_stats_json(const FilterStats& stats);
FilterStats filter_stats_from_json(const std::string& text);

// Heuristic only: literal ids referenced by the verifier should appear in
// the instruction, otherwise the task may be unanswerable as worded.
// Returns the missing ids.
std::vector<std::string> lint_instruction(const CatBundle& bundle);

// Shared with the rollout engine: evaluate a verifier against a state with
// the final answer bound to `answer`. Errors count as a false verdict.
struct VerifyRun {
  bool verdict = false;
  bool errored = false;
  std::string detail;
};
VerifyRun run_verify(const envs::Environment& env, env::EnvState& state,
                     const ctl::Program& verify, const std::string& answer);

}  // namespace catforge::cat
