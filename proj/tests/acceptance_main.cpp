// Acceptance gate: one [PASS]/[FAIL] line per criterion, exit 1 on any fail.
// Each criterion is checked against values derived here, never against the
// code under test's own bookkeeping.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "catforge/cat/validate.hpp"
#include "catforge/ctl/interpreter.hpp"
#include "catforge/ctl/parser.hpp"
#include "catforge/data/export.hpp"
#include "catforge/env/state.hpp"
#include "catforge/envs/suite.hpp"
#include "catforge/eval/eval.hpp"
#include "catforge/rollout/challenger.hpp"
#include "catforge/rollout/policies.hpp"
#include "catforge/rollout/rollout.hpp"
#include "catforge/util/hash.hpp"
#include "catforge/util/io.hpp"
#include "catforge/util/parallel.hpp"
#include "catforge/util/rng.hpp"
#include "golden_programs.hpp"

namespace cat = catforge::cat;
namespace ctl = catforge::ctl;
namespace data = catforge::data;
namespace env = catforge::env;
namespace envs = catforge::envs;
namespace eval = catforge::eval;
namespace fs = std::filesystem;
namespace rollout = catforge::rollout;
namespace util = catforge::util;

using catforge::ctl::Value;
using catforge::util::Rng;

namespace {

int g_failures = 0;

void report(int criterion, const char* label, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << label;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!ok) ++g_failures;
}

const std::vector<envs::EnvKind> kKinds = {envs::EnvKind::Retail, envs::EnvKind::Airline,
                                           envs::EnvKind::Calculation, envs::EnvKind::Web};

std::string q(const std::string& s) { return ctl::render(Value(s)); }

// ---- criterion 1: filter soundness round-trip --------------------------

bool criterion1(std::vector<cat::CatBundle>& corpus, std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const unsigned workers = util::default_workers();
  for (std::size_t ki = 0; ki < kKinds.size(); ++ki) {
    std::vector<cat::CatBundle> batch = rollout::generate_template_batch(
        kKinds[ki], 250, 1000 + ki * 97, envs::Scale::Small, static_cast<int>(workers));
    if (batch.size() != 250) {
      detail = std::string(envs::to_string(kKinds[ki])) + ": expected 250 bundles";
      return false;
    }
    std::vector<std::string> faults(batch.size());
    util::parallel_for(batch.size(), workers, [&](std::size_t i) {
      const cat::CatBundle& bundle = batch[i];
      if (!cat::validate(bundle).accepted) {
        faults[i] = "bundle not accepted by the filter";
        return;
      }
      rollout::OracleReplay oracle(bundle.solution);
      if (rollout::run_executor_episode(bundle, oracle, 7).reward != 1) {
        faults[i] = "solution replay reward != 1";
        return;
      }
      for (const std::string& failure : bundle.failures) {
        rollout::ScriptedPolicy failing({{rollout::PolicyStep::Kind::Code, failure}});
        if (rollout::run_executor_episode(bundle, failing, 7).reward != 0) {
          faults[i] = "failure replay reward != 0";
          return;
        }
      }
    });
    for (std::size_t i = 0; i < faults.size(); ++i) {
      if (!faults[i].empty()) {
        detail = std::string(envs::to_string(kKinds[ki])) + " bundle " + std::to_string(i) +
                 ": " + faults[i];
        return false;
      }
    }
    corpus.insert(corpus.end(), batch.begin(), batch.end());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  detail = std::to_string(corpus.size()) + " bundles, " + std::to_string(secs) + " s";
  if (corpus.size() < 1000) return false;
  return secs < 120.0;
}

// ---- criterion 2: no-op exclusion ---------------------------------------

bool criterion2(const std::vector<cat::CatBundle>& corpus, std::string& detail) {
  const unsigned workers = util::default_workers();
  std::vector<int> fresh_pass(corpus.size(), 0);
  util::parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const cat::CatBundle& bundle = corpus[i];
    const auto environment = envs::make_environment(bundle.env_kind);
    env::EnvState state =
        envs::generate_world(bundle.env_kind, bundle.base_seed, cat::bundle_scale(bundle));
    const ctl::Program verify = ctl::parse(bundle.verify);
    if (cat::run_verify(*environment, state, verify, "").verdict) fresh_pass[i] = 1;
  });
  std::int64_t vacuous = 0;
  for (int flag : fresh_pass) vacuous += flag;
  if (vacuous != 0) {
    detail = std::to_string(vacuous) + " accepted bundles pass verify on a fresh world";
    return false;
  }
  const std::vector<cat::CatBundle> planted = rollout::generate_noop_airline_batch(30, 77);
  const auto [accepted, stats] =
      cat::filter_batch(planted, cat::FilterVariant::Full, static_cast<int>(workers));
  detail = "0/" + std::to_string(corpus.size()) + " vacuous; noop plant " +
           std::to_string(stats.reject_counts.at("noop_passes")) + "/" +
           std::to_string(planted.size()) + " rejected as noop_passes";
  return accepted.empty() && stats.reject_counts.at("noop_passes") ==
                                 static_cast<std::int64_t>(planted.size());
}

// ---- criterion 3: planted-flaw precision --------------------------------

bool criterion3(std::vector<rollout::NoisyBatch>& batches, std::string& detail) {
  const unsigned workers = util::default_workers();
  for (std::size_t ki = 0; ki < kKinds.size(); ++ki) {
    rollout::NoisyBatch batch = rollout::generate_noisy_batch(kKinds[ki], 40, 500 + ki, 0.2,
                                                              envs::Scale::Small,
                                                              static_cast<int>(workers));
    const auto [accepted, stats] =
        cat::filter_batch(batch.bundles, cat::FilterVariant::Full, static_cast<int>(workers));
    const std::map<std::string, std::string> flaw_to_class = {
        {"unrunnable_verifier", "verify_unrunnable"},
        {"infeasible_solution", "solution_fails"},
        {"lenient_verifier", "noop_passes"},
    };
    for (const auto& [flaw, reject_class] : flaw_to_class) {
      if (stats.reject_counts.at(reject_class) != batch.planted.at(flaw)) {
        detail = std::string(envs::to_string(kKinds[ki])) + ": " + reject_class + " " +
                 std::to_string(stats.reject_counts.at(reject_class)) + " != planted " +
                 std::to_string(batch.planted.at(flaw));
        return false;
      }
    }
    if (static_cast<std::int64_t>(accepted.size()) != batch.planted.at("clean")) {
      detail = std::string(envs::to_string(kKinds[ki])) + ": accepted != planted clean";
      return false;
    }
    batches.push_back(std::move(batch));
  }
  detail = "4 envs x 40 bundles, every reject class count equals its planted count";
  return true;
}

// ---- criterion 4: variant monotonicity ----------------------------------

bool criterion4(const std::vector<rollout::NoisyBatch>& batches, std::string& detail) {
  const unsigned workers = util::default_workers();
  std::vector<cat::CatBundle> mixed;
  for (const rollout::NoisyBatch& batch : batches) {
    mixed.insert(mixed.end(), batch.bundles.begin(), batch.bundles.end());
  }
  std::map<cat::FilterVariant, std::set<std::string>> accepted_sets;
  for (auto variant : {cat::FilterVariant::VerifyOnly, cat::FilterVariant::VerifySolution,
                       cat::FilterVariant::Full}) {
    const auto [accepted, stats] = cat::filter_batch(mixed, variant, static_cast<int>(workers));
    for (const cat::CatBundle& bundle : accepted) {
      accepted_sets[variant].insert(cat::to_json_line(bundle));
    }
    if (stats.reject_counts.size() != 6) {
      detail = "FilterStats must report every reject class";
      return false;
    }
    const double expected_rate =
        stats.total == 0 ? 0.0
                         : static_cast<double>(stats.accepted) / static_cast<double>(stats.total);
    if (stats.pass_rate != expected_rate ||
        stats.accepted != static_cast<std::int64_t>(accepted.size())) {
      detail = std::string("pass rate mismatch for ") + cat::to_string(variant);
      return false;
    }
  }
  const auto& vo = accepted_sets[cat::FilterVariant::VerifyOnly];
  const auto& vs = accepted_sets[cat::FilterVariant::VerifySolution];
  const auto& full = accepted_sets[cat::FilterVariant::Full];
  for (const std::string& line : full) {
    if (vs.count(line) == 0) {
      detail = "full accepted a bundle verify_solution rejected";
      return false;
    }
  }
  for (const std::string& line : vs) {
    if (vo.count(line) == 0) {
      detail = "verify_solution accepted a bundle verify_only rejected";
      return false;
    }
  }
  detail = "accepted " + std::to_string(full.size()) + " <= " + std::to_string(vs.size()) +
           " <= " + std::to_string(vo.size()) + " across the ladder";
  return true;
}

// ---- criterion 5: pass@k estimator --------------------------------------

double brute_force_pass_at_k(const eval::TrialMatrix& matrix, int k) {
  const int trials = static_cast<int>(matrix.cells.front().size());
  double sum = 0.0;
  for (const auto& row : matrix.cells) {
    std::int64_t total = 0, passing = 0;
    for (int mask = 0; mask < (1 << trials); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
      total += 1;
      for (int t = 0; t < trials; ++t) {
        if ((mask >> t & 1) && row[static_cast<std::size_t>(t)] == 1) {
          passing += 1;
          break;
        }
      }
    }
    sum += static_cast<double>(passing) / static_cast<double>(total);
  }
  return sum / static_cast<double>(matrix.cells.size());
}

bool criterion5(std::string& detail) {
  Rng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    eval::TrialMatrix matrix;
    const int tasks = 1 + static_cast<int>(rng.below(8));
    for (int r = 0; r < tasks; ++r) {
      matrix.tasks.push_back("t" + std::to_string(r));
      std::vector<int> row;
      for (int c = 0; c < 4; ++c) row.push_back(rng.chance(0.4) ? 1 : 0);
      matrix.cells.push_back(std::move(row));
    }
    for (int k = 1; k <= 4; ++k) {
      const double closed = eval::pass_at_k(matrix, k);
      const double brute = brute_force_pass_at_k(matrix, k);
      if (closed != brute) {
        detail = "matrix " + std::to_string(trial) + " k=" + std::to_string(k) + ": closed " +
                 std::to_string(closed) + " != brute " + std::to_string(brute);
        return false;
      }
    }
    if (eval::pass_at_k(matrix, 4) < eval::pass_at_1(matrix)) {
      detail = "pass@4 < pass@1 on matrix " + std::to_string(trial);
      return false;
    }
  }
  detail = "closed form equals subset enumeration on 100 random 4-trial matrices";
  return true;
}

// ---- criterion 6: reward-1 data selection -------------------------------

bool criterion6(const fs::path& dir, std::string& detail) {
  std::vector<rollout::Trajectory> fixture;
  Rng rng(2026);
  std::int64_t successes = 0;
  for (int i = 0; i < 10000; ++i) {
    rollout::Trajectory t;
    t.task_ref = "task-" + std::to_string(i % 800);
    t.env_kind = kKinds[static_cast<std::size_t>(i) % kKinds.size()];
    t.seed = static_cast<std::uint64_t>(i);
    t.system_prompt = "You are the service agent at desk " + std::to_string(i % 7) + ".";
    rollout::Trajectory::Step step;
    step.action = {rollout::PolicyStep::Kind::Code, "x = " + std::to_string(i)};
    step.observation = "null";
    step.obs_kind = "tool_result";
    t.steps.push_back(step);
    t.final_answer = i % 3 == 0 ? "" : "done";
    t.terminated_by = rollout::Trajectory::End::AnswerSubmitted;
    t.reward = rng.chance(0.37) ? 1 : 0;
    t.policy_name = i % 2 == 0 ? "oracle" : "random";
    successes += t.reward;
    fixture.push_back(std::move(t));
  }
  const std::string rft_path = (dir / "rft.jsonl").string();
  const std::string distill_path = (dir / "distill.jsonl").string();
  const data::ExportStats rft = data::export_rft(fixture, rft_path);
  if (rft.written != successes || rft.dropped_overlength != 0) {
    detail = "export_rft wrote " + std::to_string(rft.written) + ", expected " +
             std::to_string(successes);
    return false;
  }
  std::int64_t lines = 0;
  for (const std::string& line : util::read_lines(rft_path)) {
    if (line.empty()) continue;
    lines += 1;
    const nlohmann::json sample = nlohmann::json::parse(line);
    if (sample.at("meta").at("reward").get<int>() != 1) {
      detail = "exported sample with reward != 1";
      return false;
    }
  }
  if (lines != successes) {
    detail = "recount " + std::to_string(lines) + " != " + std::to_string(successes);
    return false;
  }
  data::export_distill(fixture, distill_path, true);
  if (util::read_file(rft_path) != util::read_file(distill_path)) {
    detail = "distill --only-success differs from rft bytes";
    return false;
  }
  detail = std::to_string(successes) + "/10000 reward-1 trajectories exported, recount agrees";
  return true;
}

// ---- criterion 7: end-to-end determinism --------------------------------

bool run_cli_pipeline(const std::string& cli, const fs::path& dir, std::string& detail) {
  fs::create_directories(dir);
  const std::string d = dir.string();
  const std::vector<std::string> commands = {
      " challenge --env airline --n 12 --challenger template --seed 3 --out " + d +
          "/bundles.jsonl",
      " validate --in " + d + "/bundles.jsonl --out " + d + "/accepted.jsonl --stats " + d +
          "/filter_stats.json",
      " rollout --in " + d + "/accepted.jsonl --policy oracle,random --k 2 --seed 5 --out " +
          d + "/trajectories.jsonl",
      " export --in " + d + "/trajectories.jsonl --format rft --out " + d + "/rft.jsonl",
      " export --in " + d + "/trajectories.jsonl --format dpo --seed 2 --out " + d +
          "/dpo.jsonl",
      " eval --in " + d + "/trajectories.jsonl --filter-stats " + d +
          "/filter_stats.json --out " + d + "/report.json",
  };
  for (const std::string& command : commands) {
    const std::string full = "'" + cli + "'" + command + " > /dev/null 2>&1";
    if (std::system(full.c_str()) != 0) {
      detail = "command failed:" + command;
      return false;
    }
  }
  return true;
}

bool criterion7(const fs::path& dir, std::string& detail) {
  const std::string cli = CATFORGE_CLI_PATH;
  const fs::path run1 = dir / "run1";
  const fs::path run2 = dir / "run2";
  if (!run_cli_pipeline(cli, run1, detail) || !run_cli_pipeline(cli, run2, detail)) {
    return false;
  }
  const std::vector<std::string> artifacts = {"bundles.jsonl",      "accepted.jsonl",
                                              "filter_stats.json",  "trajectories.jsonl",
                                              "rft.jsonl",          "dpo.jsonl",
                                              "report.json"};
  for (const std::string& artifact : artifacts) {
    const std::string d1 = util::sha256_hex(util::read_file(run1 / artifact));
    const std::string d2 = util::sha256_hex(util::read_file(run2 / artifact));
    if (d1 != d2) {
      detail = artifact + " digests differ: " + d1.substr(0, 12) + " vs " + d2.substr(0, 12);
      return false;
    }
  }
  detail = std::to_string(artifacts.size()) + " artifact digests identical across two runs";
  return true;
}

// ---- criterion 8: interpreter conformance -------------------------------

bool criterion8(std::string& detail) {
  const auto& programs = golden::programs();
  if (programs.size() < 60) {
    detail = "only " + std::to_string(programs.size()) + " golden programs";
    return false;
  }
  for (const auto& g : programs) {
    const std::string got = golden::run_golden(g.source);
    if (got != g.expected) {
      detail = std::string(g.name) + ": got " + got + ", expected " + g.expected;
      return false;
    }
  }
  // Breach programs must fail as LimitExceeded, not hang or crash.
  const std::vector<const char*> breaches = {
      "x = 0\nl = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]\n"
      "for a in l {\n  for b in l {\n    for c in l {\n      for d in l {\n"
      "        x = x + 1\n      }\n    }\n  }\n}",
      "s = \"aaaaaaaaaaaaaaaa\"\n"
      "for i in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17] {\n"
      "  s = s + s\n}",
      "return 9223372036854775807 + 1",
  };
  for (const char* source : breaches) {
    const std::string got = golden::run_golden(source);
    if (got != "error:LimitExceeded") {
      detail = "breach program ended as " + got;
      return false;
    }
  }
  detail = std::to_string(programs.size()) + " golden programs, 3 limit breaches contained";
  return true;
}

// ---- criterion 9: audit confusion ---------------------------------------

bool criterion9(const std::vector<rollout::NoisyBatch>& batches, std::string& detail) {
  const unsigned workers = util::default_workers();
  std::vector<cat::CatBundle> bundles;
  for (const rollout::NoisyBatch& batch : batches) {
    bundles.insert(bundles.end(), batch.bundles.begin(), batch.bundles.end());
  }
  // Mislabel a known prefix of each class so all four confusion cells are
  // planted analytically.
  std::vector<eval::AuditItem> items(bundles.size());
  eval::Confusion planted;
  int clean_flips = 0, flawed_flips = 0;
  util::parallel_for(bundles.size(), workers, [&](std::size_t i) {
    items[i].filter_accepted = cat::validate(bundles[i]).accepted;
  });
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const bool clean = bundles[i].metadata.at("planted_flaw").as_str() == "clean";
    bool oracle_valid = clean;
    if (clean && clean_flips < 3) {
      oracle_valid = false;
      clean_flips += 1;
    } else if (!clean && flawed_flips < 2) {
      oracle_valid = true;
      flawed_flips += 1;
    }
    items[i].oracle_valid = oracle_valid;
    if (items[i].filter_accepted && oracle_valid) planted.tp += 1;
    if (items[i].filter_accepted && !oracle_valid) planted.fp += 1;
    if (!items[i].filter_accepted && !oracle_valid) planted.tn += 1;
    if (!items[i].filter_accepted && oracle_valid) planted.fn += 1;
  }
  const eval::Confusion got = eval::audit(items);
  if (got.tp != planted.tp || got.tn != planted.tn || got.fp != planted.fp ||
      got.fn != planted.fn) {
    detail = "got TP/TN/FP/FN " + std::to_string(got.tp) + "/" + std::to_string(got.tn) + "/" +
             std::to_string(got.fp) + "/" + std::to_string(got.fn);
    return false;
  }
  if (got.total() != static_cast<std::int64_t>(bundles.size())) {
    detail = "confusion total != audited trajectories";
    return false;
  }
  detail = "TP " + std::to_string(got.tp) + ", TN " + std::to_string(got.tn) + ", FP " +
           std::to_string(got.fp) + ", FN " + std::to_string(got.fn) + " all planted exactly";
  return true;
}

// ---- criterion 10: difficulty histogram ---------------------------------

struct RetailPick {
  std::string pending_id;
  std::string pending_item;
  std::string pending_method;
};

RetailPick scan_retail(std::uint64_t seed) {
  RetailPick pick;
  const env::EnvState state =
      envs::generate_world(envs::EnvKind::Retail, seed, envs::Scale::Small);
  for (const auto& [order_id, record] : state.tables.at("orders")) {
    const auto& order = record.as_map();
    if (order.at("status").as_str() != "pending") continue;
    pick.pending_id = order_id;
    pick.pending_method = order.at("payment_history")
                              .as_list()
                              .front()
                              .as_map()
                              .at("payment_method_id")
                              .as_str();
    pick.pending_item = order.at("items").as_list().front().as_map().at("item_id").as_str();
    break;
  }
  return pick;
}

cat::CatBundle cancel_bundle(std::uint64_t seed, const std::string& solution_prefix) {
  const RetailPick pick = scan_retail(seed);
  cat::CatBundle b;
  b.instruction = "I am the owner of pending order " + pick.pending_id +
                  ". Please cancel it; I no longer need it.";
  b.verify = "o = get_order_details(order_id=" + q(pick.pending_id) +
             ")\nreturn o[\"status\"] == \"cancelled\" and len(o[\"payment_history\"]) == 2";
  b.solution = solution_prefix + "cancel_order(order_id=" + q(pick.pending_id) + ")";
  b.failures = {
      "noop = 1",
      "peek = get_order_details(order_id=" + q(pick.pending_id) + ")",
      "return_delivered_order_items(order_id=" + q(pick.pending_id) + ", item_ids=[" +
          q(pick.pending_item) + "], payment_method_id=" + q(pick.pending_method) + ")",
  };
  b.env_kind = envs::EnvKind::Retail;
  b.base_seed = seed;
  return b;
}

bool criterion10(std::string& detail) {
  // Hand counts: 1 statement; 3 pads + call = 4; pad + for + if + two
  // branch assigns + call = 6.
  const std::string pad3 = "a = 1\nb = 2\nc = 3\n";
  const std::string loop =
      "total = 0\n"
      "for x in [1, 2] {\n"
      "  if x > 1 {\n"
      "    total = total + x\n"
      "  } else {\n"
      "    total = total - x\n"
      "  }\n"
      "}\n";
  std::vector<cat::CatBundle> bundles = {
      cancel_bundle(30, ""),   cancel_bundle(31, ""),   cancel_bundle(32, pad3),
      cancel_bundle(33, pad3), cancel_bundle(34, loop),
  };
  const std::vector<std::int64_t> hand_counts = {1, 1, 4, 4, 6};
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    if (cat::difficulty(bundles[i]) != hand_counts[i]) {
      detail = "bundle " + std::to_string(i) + " difficulty != hand count";
      return false;
    }
  }
  const auto [accepted, stats] = cat::filter_batch(bundles);
  const std::map<std::int64_t, std::int64_t> expected = {{1, 2}, {4, 2}, {6, 1}};
  if (accepted.size() != bundles.size() || stats.difficulty_histogram != expected) {
    detail = "histogram does not match hand counts";
    return false;
  }
  eval::Report rendered;
  rendered.filter = stats;
  const std::string table = eval::report_table(rendered);
  const std::size_t header = table.find("difficulty histogram (solution statements -> tasks)");
  const std::size_t bin1 = table.find("1: 2", header);
  const std::size_t bin4 = table.find("4: 2", bin1);
  const std::size_t bin6 = table.find("6: 1", bin4);
  if (header == std::string::npos || bin1 == std::string::npos ||
      bin4 == std::string::npos || bin6 == std::string::npos) {
    detail = "rendered histogram missing ordered solution-length bins";
    return false;
  }
  detail = "bins {1: 2, 4: 2, 6: 1} match hand counts, x-axis is solution statements";
  return true;
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / "catforge_acceptance";
  std::error_code ec;
  fs::remove_all(scratch, ec);
  fs::create_directories(scratch);

  std::vector<cat::CatBundle> corpus;
  std::vector<rollout::NoisyBatch> noisy;

  struct Criterion {
    int number;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "1000+ template bundles replay: solutions to 1, failures to 0",
       [&](std::string& d) { return criterion1(corpus, d); }},
      {2, "no accepted bundle is a no-op; planted no-op batch fully rejected",
       [&](std::string& d) { return criterion2(corpus, d); }},
      {3, "noisy planted flaw counts equal filter reject-class counts",
       [&](std::string& d) { return criterion3(noisy, d); }},
      {4, "filter variants form a monotone ladder with reported pass rates",
       [&](std::string& d) { return criterion4(noisy, d); }},
      {5, "pass@k closed form equals subset enumeration; pass@4 >= pass@1",
       [&](std::string& d) { return criterion5(d); }},
      {6, "rft export is exactly the reward-1 subset; distill matches bytes",
       [&](std::string& d) { return criterion6(scratch, d); }},
      {7, "scripted pipeline is byte-identical across two runs",
       [&](std::string& d) { return criterion7(scratch, d); }},
      {8, "golden interpreter suite passes; limit breaches stay contained",
       [&](std::string& d) { return criterion8(d); }},
      {9, "audit confusion matrix equals planted counts",
       [&](std::string& d) { return criterion9(noisy, d); }},
      {10, "difficulty histogram matches hand-counted solution lengths",
       [&](std::string& d) { return criterion10(d); }},
  };
  for (const Criterion& criterion : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(criterion.number, criterion.label, ok, detail);
  }

  fs::remove_all(scratch, ec);
  if (g_failures != 0) {
    std::cout << g_failures << " criteria failed\n";
    return 1;
  }
  std::cout << "all 10 criteria passed\n";
  return 0;
}
