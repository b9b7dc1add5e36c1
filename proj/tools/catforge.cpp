#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "catforge/cat/bundle.hpp"
#include "catforge/cat/validate.hpp"
#include "catforge/data/export.hpp"
#include "catforge/env/state.hpp"
#include "catforge/envs/suite.hpp"
#include "catforge/eval/eval.hpp"
#include "catforge/rollout/challenger.hpp"
#include "catforge/rollout/policies.hpp"
#include "catforge/rollout/rollout.hpp"
#include "catforge/util/io.hpp"
#include "catforge/util/parallel.hpp"
#include "catforge/util/rng.hpp"

namespace cat = catforge::cat;
namespace data = catforge::data;
namespace env = catforge::env;
namespace envs = catforge::envs;
namespace eval = catforge::eval;
namespace rollout = catforge::rollout;
namespace util = catforge::util;

using catforge::ctl::Value;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitRemote = 4;

int config_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return kExitConfig;
}

envs::EnvKind env_kind_of(const std::string& name) {
  return *envs::parse_env_kind(name);  // IsMember has already vetted name
}

envs::Scale scale_of(const std::string& name) { return *envs::parse_scale(name); }

cat::FilterVariant variant_of(const std::string& name) {
  if (name == "verify_only") return cat::FilterVariant::VerifyOnly;
  if (name == "verify_solution") return cat::FilterVariant::VerifySolution;
  return cat::FilterVariant::Full;
}

std::string task_label(const cat::CatBundle& bundle, std::size_t index) {
  auto it = bundle.metadata.find("task_id");
  if (it != bundle.metadata.end() && it->second.is_str()) return it->second.as_str();
  return "#" + std::to_string(index);
}

// Everything a remote chat policy needs except the auth token, which comes
// only from the CATFORGE_API_TOKEN environment variable.
struct RemoteOpts {
  std::string endpoint;
  std::string model = "default";
  double temperature = 0.0;
  std::int64_t max_tokens = 1024;
  int attempts = 3;
  int backoff_ms = 100;
  int timeout_seconds = 60;
};

void add_remote_options(CLI::App* cmd, RemoteOpts& opts) {
  cmd->add_option("--endpoint", opts.endpoint,
                  "Chat-completions base URL (scheme://host[:port]); required for remote");
  cmd->add_option("--model", opts.model, "Model name sent to the endpoint");
  cmd->add_option("--temperature", opts.temperature, "Sampling temperature");
  cmd->add_option("--max-tokens", opts.max_tokens, "Completion token cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--attempts", opts.attempts, "Transport attempts per request")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--backoff-ms", opts.backoff_ms, "Initial retry backoff, doubles per retry")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--timeout", opts.timeout_seconds, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber);
}

rollout::RemoteChatConfig remote_config(const RemoteOpts& opts) {
  rollout::RemoteChatConfig config;
  config.base_url = opts.endpoint;
  config.model = opts.model;
  config.temperature = opts.temperature;
  config.max_tokens = opts.max_tokens;
  config.max_attempts = opts.attempts;
  config.backoff_ms = opts.backoff_ms;
  config.timeout_seconds = opts.timeout_seconds;
  if (const char* token = std::getenv("CATFORGE_API_TOKEN")) config.auth_token = token;
  return config;
}

// One round trip before committing to a batch, so an unreachable endpoint
// fails fast with its own exit code instead of producing error trajectories.
void probe_remote(const RemoteOpts& opts) {
  rollout::RemoteChatPolicy probe(remote_config(opts));
  probe.next_action(
      {{"system", "Connectivity check. Reply with one block:\nMESSAGE\nok\nEND MESSAGE"}});
}

int run_gen_env(const std::string& kind, std::uint64_t seed, const std::string& scale,
                const std::string& out) {
  const envs::EnvState state = envs::generate_world(env_kind_of(kind), seed, scale_of(scale));
  util::atomic_write(out, env::snapshot(state));
  std::cout << "wrote " << out << "\n";
  std::cout << "digest " << env::digest(state) << "\n";
  return kExitOk;
}

int run_challenge(const std::string& kind_name, int n, const std::string& challenger,
                  std::uint64_t seed, const std::string& scale_name, double flaw_fraction,
                  std::int64_t max_steps, const std::string& out, const RemoteOpts& remote,
                  unsigned workers) {
  const envs::EnvKind kind = env_kind_of(kind_name);
  const envs::Scale scale = scale_of(scale_name);
  std::vector<cat::CatBundle> bundles;
  if (challenger == "template") {
    bundles = rollout::generate_template_batch(kind, n, seed, scale, static_cast<int>(workers));
  } else if (challenger == "noisy") {
    rollout::NoisyBatch batch = rollout::generate_noisy_batch(kind, n, seed, flaw_fraction,
                                                              scale, static_cast<int>(workers));
    bundles = std::move(batch.bundles);
    for (const auto& [label, count] : batch.planted) {
      std::cout << "planted " << label << ": " << count << "\n";
    }
  } else {  // remote
    if (remote.endpoint.empty()) {
      return config_error("--endpoint is required with --challenger remote");
    }
    probe_remote(remote);
    std::vector<std::optional<cat::CatBundle>> slots(static_cast<std::size_t>(n));
    rollout::RolloutOptions options;
    options.max_steps = max_steps;
    util::parallel_for(slots.size(), workers, [&](std::size_t i) {
      rollout::RemoteChatPolicy policy(remote_config(remote));
      const std::uint64_t episode_seed = util::derive_seed(seed, i);
      policy.reseed(episode_seed);
      try {
        cat::CatBundle bundle =
            rollout::run_challenger_episode(kind, policy, episode_seed, scale, options);
        bundle.metadata["task_id"] =
            Value(std::string(envs::to_string(kind)) + "-remote-" + std::to_string(i));
        bundle.metadata["challenger"] = Value(std::string("remote"));
        slots[i] = std::move(bundle);
      } catch (const rollout::MalformedAnswer&) {
      } catch (const rollout::ExplorationExhausted&) {
      }
    });
    for (auto& slot : slots) {
      if (slot.has_value()) bundles.push_back(std::move(*slot));
    }
    if (bundles.size() < slots.size()) {
      std::cerr << "warning: " << slots.size() - bundles.size() << "/" << slots.size()
                << " challenger episodes produced no bundle\n";
    }
  }
  cat::save_bundles(out, bundles);
  std::cout << "wrote " << bundles.size() << " bundles to " << out << "\n";
  return kExitOk;
}

int run_validate(const std::string& in, const std::string& out, const std::string& stats_path,
                 const std::string& variant_name, unsigned workers) {
  const std::vector<cat::CatBundle> bundles = cat::load_bundles(in);
  const auto [accepted, stats] =
      cat::filter_batch(bundles, variant_of(variant_name), static_cast<int>(workers));
  cat::save_bundles(out, accepted);
  if (!stats_path.empty()) {
    util::atomic_write(stats_path, cat::filter_stats_json(stats) + "\n");
  }
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    for (const std::string& id : cat::lint_instruction(accepted[i])) {
      std::cerr << "lint: " << task_label(accepted[i], i) << ": instruction never mentions '"
                << id << "'\n";
    }
  }
  eval::Report report;
  report.filter = stats;
  std::cout << eval::report_table(report);
  if (accepted.empty()) {
    std::cerr << "error: no bundles survived the filter\n";
    return kExitEmpty;
  }
  std::cout << "wrote " << accepted.size() << " bundles to " << out << "\n";
  return kExitOk;
}

std::unique_ptr<rollout::Policy> make_policy(const std::string& name,
                                             const cat::CatBundle& bundle, std::uint64_t seed,
                                             const RemoteOpts& remote) {
  if (name == "oracle") return std::make_unique<rollout::OracleReplay>(bundle.solution);
  if (name == "random") return std::make_unique<rollout::RandomToolPolicy>(seed);
  auto policy = std::make_unique<rollout::RemoteChatPolicy>(remote_config(remote));
  policy->reseed(seed);
  return policy;
}

int run_rollout(const std::string& in, const std::string& out,
                const std::vector<std::string>& policies, int k, std::uint64_t seed,
                std::int64_t max_steps, bool keep_snapshots, const RemoteOpts& remote,
                unsigned workers) {
  const std::vector<cat::CatBundle> bundles = cat::load_bundles(in);
  if (bundles.empty()) {
    std::cerr << "error: no bundles in " << in << "\n";
    return kExitEmpty;
  }
  const bool wants_remote =
      std::find(policies.begin(), policies.end(), "remote") != policies.end();
  if (wants_remote) {
    if (remote.endpoint.empty()) {
      return config_error("--endpoint is required with --policy remote");
    }
    probe_remote(remote);
  }
  rollout::RolloutOptions options;
  options.max_steps = max_steps;
  options.keep_snapshot = keep_snapshots;
  const std::size_t cells_per_policy = bundles.size() * static_cast<std::size_t>(k);
  std::vector<rollout::Trajectory> trajectories(policies.size() * cells_per_policy);
  util::parallel_for(trajectories.size(), workers, [&](std::size_t idx) {
    const std::size_t pi = idx / cells_per_policy;
    const std::size_t cell = idx % cells_per_policy;
    const std::size_t bi = cell / static_cast<std::size_t>(k);
    const std::uint64_t cell_seed = util::derive_seed(util::derive_seed(seed, pi), cell);
    std::unique_ptr<rollout::Policy> policy =
        make_policy(policies[pi], bundles[bi], cell_seed, remote);
    trajectories[idx] = rollout::run_executor_episode(bundles[bi], *policy, cell_seed, options);
  });
  rollout::save_trajectories(out, trajectories);
  for (std::size_t pi = 0; pi < policies.size(); ++pi) {
    std::int64_t hits = 0;
    for (std::size_t cell = 0; cell < cells_per_policy; ++cell) {
      hits += trajectories[pi * cells_per_policy + cell].reward;
    }
    std::cout << policies[pi] << ": " << cells_per_policy << " episodes, mean reward "
              << static_cast<double>(hits) / static_cast<double>(cells_per_policy) << "\n";
  }
  std::cout << "wrote " << trajectories.size() << " trajectories to " << out << "\n";
  return kExitOk;
}

int run_export(const std::string& in, const std::string& out, const std::string& format,
               bool only_success, std::int64_t max_chars, int pairs_per_task,
               std::uint64_t seed) {
  const std::vector<rollout::Trajectory> trajectories = rollout::load_trajectories(in);
  data::ExportOptions options;
  options.max_chars = max_chars;
  options.pairs_per_task = pairs_per_task;
  options.seed = seed;
  data::ExportStats stats;
  if (format == "rft") {
    stats = data::export_rft(trajectories, out, options);
  } else if (format == "distill") {
    stats = data::export_distill(trajectories, out, only_success, options);
  } else {  // dpo
    stats = data::export_dpo(trajectories, out, options);
  }
  std::cout << "wrote " << stats.written << " samples to " << out << " (dropped "
            << stats.dropped_overlength << " over-length)\n";
  if (format == "dpo") {
    std::cout << stats.tasks_without_pairs << " tasks had no success/failure pair\n";
  }
  if (stats.written == 0) {
    std::cerr << "error: nothing to export\n";
    return kExitEmpty;
  }
  return kExitOk;
}

int run_eval(const std::vector<std::string>& inputs, int k, const std::string& stats_path,
             const std::string& out) {
  std::vector<rollout::Trajectory> trajectories;
  for (const std::string& path : inputs) {
    std::vector<rollout::Trajectory> part = rollout::load_trajectories(path);
    trajectories.insert(trajectories.end(), std::make_move_iterator(part.begin()),
                        std::make_move_iterator(part.end()));
  }
  std::map<std::pair<std::string, std::string>,
           std::vector<std::tuple<std::string, std::uint64_t, int>>>
      groups;
  for (const rollout::Trajectory& t : trajectories) {
    groups[{envs::to_string(t.env_kind), t.policy_name}].push_back(
        {t.task_ref, t.seed, t.reward});
  }
  eval::Report report;
  for (const auto& [key, outcomes] : groups) {
    const eval::TrialMatrix matrix = eval::matrix_from_outcomes(outcomes);
    eval::ReportRow row;
    row.env = key.first;
    row.policy = key.second;
    row.tasks = static_cast<std::int64_t>(matrix.tasks.size());
    row.trials = static_cast<std::int64_t>(matrix.cells.front().size());
    row.k = k == 0 ? static_cast<int>(row.trials) : k;
    row.pass1 = eval::pass_at_1(matrix);
    row.passk = eval::pass_at_k(matrix, row.k);
    report.rows.push_back(row);
  }
  if (!stats_path.empty()) {
    report.filter = cat::filter_stats_from_json(util::read_file(stats_path));
  }
  util::atomic_write(out, eval::report_json(report) + "\n");
  std::cout << eval::report_table(report);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_audit(const std::string& in, const std::string& variant_name, const std::string& out,
              unsigned workers) {
  const std::vector<cat::CatBundle> bundles = cat::load_bundles(in);
  std::vector<eval::AuditItem> items(bundles.size());
  const cat::FilterVariant variant = variant_of(variant_name);
  util::parallel_for(bundles.size(), workers, [&](std::size_t i) {
    items[i].filter_accepted = cat::validate(bundles[i], variant).accepted;
    auto it = bundles[i].metadata.find("planted_flaw");
    if (it != bundles[i].metadata.end() && it->second.is_str()) {
      items[i].oracle_valid = it->second.as_str() == "clean";
    }
  });
  eval::Report report;
  report.confusion = eval::audit(items);
  util::atomic_write(out, eval::report_json(report) + "\n");
  std::cout << eval::report_table(report);
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catforge: challenger/executor task pipeline over simulated tool worlds"};
  app.option_defaults()->always_capture_default();
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML file; flags override it");
  app.footer(
      "Exit codes: 0 success, 2 config error, 3 empty result set, 4 remote endpoint failure.\n"
      "Remote auth: set the CATFORGE_API_TOKEN environment variable.");

  unsigned workers = util::default_workers();
  bool ci = false;
  app.add_option("--workers", workers, "Worker threads for batch stages")
      ->check(CLI::PositiveNumber);
  app.add_flag("--ci", ci, "Refuse randomized stages whose --seed was not given explicitly");

  const std::vector<std::string> kinds = {"retail", "airline", "calculation", "web"};
  const std::vector<std::string> scales = {"small", "medium"};
  const std::vector<std::string> variants = {"full", "verify_solution", "verify_only"};

  auto* gen = app.add_subcommand("gen-env", "Generate a world snapshot and print its digest");
  std::string gen_kind = "retail";
  std::uint64_t gen_seed = 1;
  std::string gen_scale = "small";
  std::string gen_out = "world.snap";
  gen->add_option("--env", gen_kind, "World kind")->check(CLI::IsMember(kinds));
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "World seed");
  gen->add_option("--scale", gen_scale, "World size")->check(CLI::IsMember(scales));
  gen->add_option("--out", gen_out, "Snapshot path");

  auto* ch = app.add_subcommand("challenge", "Generate task bundles with a challenger");
  std::string ch_kind = "retail";
  int ch_n = 100;
  std::string ch_challenger = "template";
  std::uint64_t ch_seed = 1;
  std::string ch_scale = "small";
  double ch_flaw = 0.2;
  std::int64_t ch_max_steps = 15;
  std::string ch_out = "bundles.jsonl";
  RemoteOpts ch_remote;
  ch->add_option("--env", ch_kind, "World kind")->check(CLI::IsMember(kinds));
  ch->add_option("--n", ch_n, "Number of bundles to generate")->check(CLI::PositiveNumber);
  ch->add_option("--challenger", ch_challenger, "Bundle source")
      ->check(CLI::IsMember({"template", "noisy", "remote"}));
  auto* ch_seed_opt = ch->add_option("--seed", ch_seed, "Base seed for worlds and choices");
  ch->add_option("--scale", ch_scale, "World size")->check(CLI::IsMember(scales));
  ch->add_option("--flaw-fraction", ch_flaw, "Noisy challenger: fraction flawed per class")
      ->check(CLI::Range(0.0, 1.0));
  ch->add_option("--max-steps", ch_max_steps, "Exploration budget per challenger episode")
      ->check(CLI::PositiveNumber);
  ch->add_option("--out", ch_out, "Bundle JSONL path");
  add_remote_options(ch, ch_remote);

  auto* va = app.add_subcommand("validate", "Execution-filter bundles into an accepted subset");
  std::string va_in;
  std::string va_out = "accepted.jsonl";
  std::string va_stats = "filter_stats.json";
  std::string va_variant = "full";
  va->add_option("--in", va_in, "Bundle JSONL path")->required();
  va->add_option("--out", va_out, "Accepted-bundle JSONL path");
  va->add_option("--stats", va_stats, "Filter-stats JSON path; empty to skip");
  va->add_option("--variant", va_variant, "Check ladder rung")->check(CLI::IsMember(variants));

  auto* ro = app.add_subcommand("rollout", "Run executor policies over accepted bundles");
  std::string ro_in;
  std::string ro_out = "trajectories.jsonl";
  std::vector<std::string> ro_policies = {"oracle"};
  int ro_k = 1;
  std::uint64_t ro_seed = 1;
  std::int64_t ro_max_steps = 15;
  bool ro_keep = false;
  RemoteOpts ro_remote;
  ro->add_option("--in", ro_in, "Accepted-bundle JSONL path")->required();
  ro->add_option("--out", ro_out, "Trajectory JSONL path");
  ro->add_option("--policy", ro_policies, "Executor policies, comma separated")
      ->delimiter(',')
      ->check(CLI::IsMember({"oracle", "random", "remote"}));
  ro->add_option("--k", ro_k, "Independent trials per bundle")->check(CLI::PositiveNumber);
  auto* ro_seed_opt = ro->add_option("--seed", ro_seed, "Run seed; trial seeds derive from it");
  ro->add_option("--max-steps", ro_max_steps, "Episode step budget")->check(CLI::PositiveNumber);
  ro->add_flag("--keep-snapshots", ro_keep, "Embed final world snapshots in trajectories");
  add_remote_options(ro, ro_remote);

  auto* ex = app.add_subcommand("export", "Turn trajectories into training data files");
  std::string ex_in;
  std::string ex_out = "train.jsonl";
  std::string ex_format = "rft";
  bool ex_only_success = false;
  std::int64_t ex_max_chars = 64768;
  int ex_pairs = 4;
  std::uint64_t ex_seed = 1;
  ex->add_option("--in", ex_in, "Trajectory JSONL path")->required();
  ex->add_option("--out", ex_out, "Training data path");
  ex->add_option("--format", ex_format, "rft: reward-1 chat samples; distill: all; dpo: pairs")
      ->check(CLI::IsMember({"rft", "distill", "dpo"}));
  ex->add_flag("--only-success", ex_only_success, "distill: keep reward-1 trajectories only");
  ex->add_option("--max-chars", ex_max_chars, "Drop samples above this many content chars")
      ->check(CLI::PositiveNumber);
  ex->add_option("--pairs-per-task", ex_pairs, "dpo: preference pairs kept per task")
      ->check(CLI::PositiveNumber);
  auto* ex_seed_opt = ex->add_option("--seed", ex_seed, "dpo: pair-sampling seed");

  auto* ev = app.add_subcommand("eval", "Aggregate trajectories into a pass@k report");
  std::vector<std::string> ev_in;
  int ev_k = 0;
  std::string ev_stats;
  std::string ev_out = "report.json";
  ev->add_option("--in", ev_in, "Trajectory JSONL paths")->required();
  ev->add_option("--k", ev_k, "pass@k cutoff; 0 means the trial count")
      ->check(CLI::NonNegativeNumber);
  ev->add_option("--filter-stats", ev_stats, "Merge a filter-stats JSON into the report");
  ev->add_option("--out", ev_out, "Report JSON path");

  auto* au = app.add_subcommand("audit", "Compare filter verdicts against planted ground truth");
  std::string au_in;
  std::string au_variant = "full";
  std::string au_out = "audit.json";
  au->add_option("--in", au_in, "Bundle JSONL path with planted_flaw labels")->required();
  au->add_option("--variant", au_variant, "Check ladder rung")->check(CLI::IsMember(variants));
  au->add_option("--out", au_out, "Audit JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ci) {
      const bool seed_missing =
          (app.got_subcommand(gen) && gen_seed_opt->count() == 0) ||
          (app.got_subcommand(ch) && ch_seed_opt->count() == 0) ||
          (app.got_subcommand(ro) && ro_seed_opt->count() == 0) ||
          (app.got_subcommand(ex) && ex_format == "dpo" && ex_seed_opt->count() == 0);
      if (seed_missing) return config_error("--seed is required in CI mode");
    }
    if (app.got_subcommand(gen)) {
      return run_gen_env(gen_kind, gen_seed, gen_scale, gen_out);
    }
    if (app.got_subcommand(ch)) {
      return run_challenge(ch_kind, ch_n, ch_challenger, ch_seed, ch_scale, ch_flaw,
                           ch_max_steps, ch_out, ch_remote, workers);
    }
    if (app.got_subcommand(va)) {
      return run_validate(va_in, va_out, va_stats, va_variant, workers);
    }
    if (app.got_subcommand(ro)) {
      return run_rollout(ro_in, ro_out, ro_policies, ro_k, ro_seed, ro_max_steps, ro_keep,
                         ro_remote, workers);
    }
    if (app.got_subcommand(ex)) {
      return run_export(ex_in, ex_out, ex_format, ex_only_success, ex_max_chars, ex_pairs,
                        ex_seed);
    }
    if (app.got_subcommand(ev)) {
      return run_eval(ev_in, ev_k, ev_stats, ev_out);
    }
    if (app.got_subcommand(au)) {
      return run_audit(au_in, au_variant, au_out, workers);
    }
  } catch (const rollout::PolicyTransportError& e) {
    std::cerr << "error: remote endpoint: " << e.what() << "\n";
    return kExitRemote;
  } catch (const std::exception& e) {
    return config_error(e.what());
  }
  return kExitOk;
}
