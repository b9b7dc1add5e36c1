#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catforge/rollout/rollout.hpp"

namespace catforge::rollout {

// Deterministic challenger: explores a fresh world through hidden listing
// tools, picks a target record by seed, and answers with a templated task
// bundle. Everything it knows comes from observations in the transcript.
class TemplateChallengerPolicy : public Policy {
 public:
  TemplateChallengerPolicy(envs::EnvKind kind, std::uint64_t seed)
      : kind_(kind), seed_(seed) {}
  PolicyStep next_action(const Transcript& transcript) override;
  std::string name() const override { return "template"; }
  void reseed(std::uint64_t seed) override { seed_ = seed; }

 private:
  envs::EnvKind kind_;
  std::uint64_t seed_;
};

// One templated bundle per (kind, seed); thin wrapper over a challenger
// episode driven by TemplateChallengerPolicy.
CatBundle generate_template_bundle(envs::EnvKind kind, std::uint64_t seed,
                                   envs::Scale scale = envs::Scale::Small);

std::vector<CatBundle> generate_template_batch(envs::EnvKind kind, int n,
                                               std::uint64_t seed,
                                               envs::Scale scale = envs::Scale::Small,
                                               int workers = 1);

struct NoisyBatch {
  std::vector<CatBundle> bundles;
  // planted flaw label -> count; labels: clean, unrunnable_verifier,
  // infeasible_solution, lenient_verifier.
  std::map<std::string, int> planted;
};

// Corrupts a fixed fraction of template bundles with mechanically
// detectable flaws; each bundle's label is stored in metadata["planted_flaw"].
NoisyBatch generate_noisy_batch(envs::EnvKind kind, int n, std::uint64_t seed,
                                double flaw_fraction = 0.2,
                                envs::Scale scale = envs::Scale::Small,
                                int workers = 1);

// Airline bundles whose goal already holds on the fresh world, so the
// verifier passes without any action being taken.
std::vector<CatBundle> generate_noop_airline_batch(int n, std::uint64_t seed,
                                                   envs::Scale scale = envs::Scale::Small);

}  // namespace catforge::rollout
