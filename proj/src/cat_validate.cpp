#include "catforge/cat/validate.hpp"

#include <functional>
#include <set>

#include "catforge/ctl/interpreter.hpp"
#include "catforge/ctl/parser.hpp"
#include "catforge/env/tools.hpp"
#include "catforge/util/parallel.hpp"
#include "json.hpp"

namespace catforge::cat {

const char* to_string(RejectClass c) {
  switch (c) {
    case RejectClass::Unparsable: return "unparsable";
    case RejectClass::VerifyUnrunnable: return "verify_unrunnable";
    case RejectClass::SolutionFails: return "solution_fails";
    case RejectClass::FailurePasses: return "failure_passes";
    case RejectClass::NoopPasses: return "noop_passes";
    case RejectClass::VerifyMutates: return "verify_mutates";
  }
  return "rejected";
}

const char* to_string(FilterVariant v) {
  switch (v) {
    case FilterVariant::VerifyOnly: return "verify_only";
    case FilterVariant::VerifySolution: return "verify_solution";
    case FilterVariant::Full: return "full";
  }
  return "full";
}

namespace {

// Every name the program could invoke as a tool, builtins excluded.
void collect_tool_names(const ctl::Expr& expr, std::set<std::string>& out);

void collect_tool_names(const ctl::Block& block, std::set<std::string>& out) {
  for (const auto& stmt : block) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ctl::AssignStmt>) {
            collect_tool_names(*node.value, out);
          } else if constexpr (std::is_same_v<T, ctl::ExprStmt>) {
            collect_tool_names(*node.expr, out);
          } else if constexpr (std::is_same_v<T, ctl::IfStmt>) {
            collect_tool_names(*node.cond, out);
            collect_tool_names(node.then_body, out);
            collect_tool_names(node.else_body, out);
          } else if constexpr (std::is_same_v<T, ctl::ForStmt>) {
            collect_tool_names(*node.iterable, out);
            collect_tool_names(node.body, out);
          } else {
            collect_tool_names(*node.value, out);
          }
        },
        stmt->node);
  }
}

void collect_tool_names(const ctl::Expr& expr, std::set<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ctl::ListLit>) {
          for (const auto& item : node.items) collect_tool_names(*item, out);
        } else if constexpr (std::is_same_v<T, ctl::MapLit>) {
          for (const auto& [key, value] : node.entries) collect_tool_names(*value, out);
        } else if constexpr (std::is_same_v<T, ctl::UnaryNeg> ||
                             std::is_same_v<T, ctl::NotExpr>) {
          collect_tool_names(*node.operand, out);
        } else if constexpr (std::is_same_v<T, ctl::BinExpr>) {
          collect_tool_names(*node.lhs, out);
          collect_tool_names(*node.rhs, out);
        } else if constexpr (std::is_same_v<T, ctl::IndexExpr>) {
          collect_tool_names(*node.target, out);
          collect_tool_names(*node.key, out);
        } else if constexpr (std::is_same_v<T, ctl::CallExpr>) {
          if (!node.builtin) out.insert(node.name);
          for (const auto& arg : node.args) collect_tool_names(*arg, out);
          for (const auto& [key, value] : node.kwargs) collect_tool_names(*value, out);
        }
      },
      expr.node);
}

void collect_string_literals(const ctl::Block& block, std::vector<std::string>& out);

void collect_string_literals(const ctl::Expr& expr, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ctl::StrLit>) {
          out.push_back(node.value);
        } else if constexpr (std::is_same_v<T, ctl::ListLit>) {
          for (const auto& item : node.items) collect_string_literals(*item, out);
        } else if constexpr (std::is_same_v<T, ctl::MapLit>) {
          for (const auto& [key, value] : node.entries) collect_string_literals(*value, out);
        } else if constexpr (std::is_same_v<T, ctl::UnaryNeg> ||
                             std::is_same_v<T, ctl::NotExpr>) {
          collect_string_literals(*node.operand, out);
        } else if constexpr (std::is_same_v<T, ctl::BinExpr>) {
          collect_string_literals(*node.lhs, out);
          collect_string_literals(*node.rhs, out);
        } else if constexpr (std::is_same_v<T, ctl::IndexExpr>) {
          collect_string_literals(*node.target, out);
          // Field access keys ("status", "order_id") are not task ids.
        } else if constexpr (std::is_same_v<T, ctl::CallExpr>) {
          for (const auto& arg : node.args) collect_string_literals(*arg, out);
          for (const auto& [key, value] : node.kwargs) collect_string_literals(*value, out);
        }
      },
      expr.node);
}

void collect_string_literals(const ctl::Block& block, std::vector<std::string>& out) {
  for (const auto& stmt : block) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ctl::AssignStmt>) {
            collect_string_literals(*node.value, out);
          } else if constexpr (std::is_same_v<T, ctl::ExprStmt>) {
            collect_string_literals(*node.expr, out);
          } else if constexpr (std::is_same_v<T, ctl::IfStmt>) {
            collect_string_literals(*node.cond, out);
            collect_string_literals(node.then_body, out);
            collect_string_literals(node.else_body, out);
          } else if constexpr (std::is_same_v<T, ctl::ForStmt>) {
            collect_string_literals(*node.iterable, out);
            collect_string_literals(node.body, out);
          } else {
            collect_string_literals(*node.value, out);
          }
        },
        stmt->node);
  }
}

std::int64_t count_statements(const ctl::Block& block) {
  std::int64_t n = 0;
  for (const auto& stmt : block) {
    n += 1;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ctl::IfStmt>) {
            n += count_statements(node.then_body);
            n += count_statements(node.else_body);
          } else if constexpr (std::is_same_v<T, ctl::ForStmt>) {
            n += count_statements(node.body);
          }
        },
        stmt->node);
  }
  return n;
}

// Does the string look like a record id one of the worlds hands out?
bool looks_like_id(const std::string& s) {
  auto all_digits = [](std::string_view v) {
    return !v.empty() && v.find_first_not_of("0123456789") == std::string_view::npos;
  };
  if (s.size() > 2 && s.rfind("#W", 0) == 0 && all_digits(s.substr(2))) return true;
  if (s.size() >= 2 && (s[0] == 'I' || s[0] == 'P' || s[0] == 'F' || s[0] == 'H') &&
      all_digits(s.substr(1))) {
    return true;
  }
  if (s.rfind("HAT", 0) == 0 && all_digits(s.substr(3))) return true;
  if (s.rfind("CF", 0) == 0 && all_digits(s.substr(2))) return true;
  if (s.size() == 6 &&
      s.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") == std::string::npos &&
      s.find_first_of("0123456789") != std::string::npos) {
    return true;
  }
  for (const char* prefix : {"paypal_", "credit_card_", "gift_card_"}) {
    std::string p(prefix);
    if (s.size() > p.size() && s.rfind(p, 0) == 0 && all_digits(s.substr(p.size()))) {
      return true;
    }
  }
  // user ids: word_word_digits
  auto last = s.rfind('_');
  if (last != std::string::npos && last + 1 < s.size() && all_digits(s.substr(last + 1)) &&
      s.find('_') != last) {
    return true;
  }
  return false;
}

struct ParsedBundle {
  ctl::Program verify;
  ctl::Program solution;
  std::vector<ctl::Program> failures;
};

// Runs a program as the executor would, then grades the end state.
struct SolutionRun {
  bool errored = false;
  std::string detail;
  std::string answer;
};

SolutionRun run_program(const envs::Environment& environment, env::EnvState& state,
                        const ctl::Program& program) {
  SolutionRun run;
  env::RegistryToolHandle handle(environment.tools(), state, env::EpisodeMode::Executor);
  try {
    ctl::EvalOutcome out = ctl::evaluate(program, &handle);
    run.answer = ctl::render_answer(out.result);
  } catch (const ctl::RuntimeError& e) {
    run.errored = true;
    run.detail = e.what();
  }
  return run;
}

}  // namespace

VerifyRun run_verify(const envs::Environment& env, env::EnvState& state,
                     const ctl::Program& verify, const std::string& answer) {
  VerifyRun run;
  // Verifiers grade with full tool visibility; only executors see a
  // censored registry.
  env::RegistryToolHandle handle(env.tools(), state, env::EpisodeMode::Challenger);
  try {
    ctl::EvalOutcome out =
        ctl::evaluate(verify, &handle, {}, {{"answer", Value(answer)}});
    run.verdict = ctl::coerce_bool(out.result);
  } catch (const ctl::RuntimeError& e) {
    run.errored = true;
    run.detail = e.what();
  }
  return run;
}

Verdict validate(const CatBundle& bundle, FilterVariant variant) {
  Verdict verdict;
  auto reject = [&](RejectClass c, const std::string& note) {
    verdict.accepted = false;
    verdict.reject_class = c;
    verdict.diagnostics.push_back(note);
    return verdict;
  };

  ParsedBundle parsed;
  if (bundle.instruction.empty()) {
    return reject(RejectClass::Unparsable, "instruction is empty");
  }
  try {
    parsed.verify = ctl::parse(bundle.verify);
  } catch (const ctl::SyntaxError& e) {
    return reject(RejectClass::Unparsable, std::string("verify: ") + e.what());
  }
  if (variant != FilterVariant::VerifyOnly) {
    try {
      parsed.solution = ctl::parse(bundle.solution);
    } catch (const ctl::SyntaxError& e) {
      return reject(RejectClass::Unparsable, std::string("solution: ") + e.what());
    }
  }
  if (variant == FilterVariant::Full) {
    if (bundle.failures.size() < 3) {
      return reject(RejectClass::Unparsable,
                    "need at least 3 failure cases, got " +
                        std::to_string(bundle.failures.size()));
    }
    for (std::size_t k = 0; k < bundle.failures.size(); ++k) {
      try {
        parsed.failures.push_back(ctl::parse(bundle.failures[k]));
      } catch (const ctl::SyntaxError& e) {
        return reject(RejectClass::Unparsable,
                      "failure " + std::to_string(k) + ": " + e.what());
      }
    }
  }
  verdict.diagnostics.push_back("parse: ok");

  auto environment = envs::make_environment(bundle.env_kind, bundle_scale(bundle));

  // No-op check: the untouched world must not already satisfy the verifier.
  // A verifier that errors here is fine; it graded the no-op as a failure.
  {
    env::EnvState fresh = environment->reset(bundle.base_seed);
    VerifyRun noop = run_verify(*environment, fresh, parsed.verify, "");
    if (!noop.errored && noop.verdict) {
      return reject(RejectClass::NoopPasses, "verify already true on the fresh world");
    }
    verdict.diagnostics.push_back("noop: verify false on fresh world");
  }

  if (variant != FilterVariant::VerifyOnly) {
    env::EnvState state = environment->reset(bundle.base_seed);
    SolutionRun run = run_program(*environment, state, parsed.solution);
    if (run.errored) {
      return reject(RejectClass::SolutionFails, "solution error: " + run.detail);
    }
    VerifyRun graded = run_verify(*environment, state, parsed.verify, run.answer);
    if (graded.errored) {
      return reject(RejectClass::VerifyUnrunnable,
                    "verify error after solution: " + graded.detail);
    }
    if (!graded.verdict) {
      return reject(RejectClass::SolutionFails, "verify false after solution");
    }
    verdict.diagnostics.push_back("solution: verified");
  }

  if (variant == FilterVariant::Full) {
    for (std::size_t k = 0; k < parsed.failures.size(); ++k) {
      env::EnvState state = environment->reset(bundle.base_seed);
      SolutionRun run = run_program(*environment, state, parsed.failures[k]);
      // A failure case that itself errors cannot pass; its partial effects
      // are still graded in case they satisfied the verifier.
      VerifyRun graded =
          run_verify(*environment, state, parsed.verify, run.errored ? "" : run.answer);
      if (!graded.errored && graded.verdict) {
        return reject(RejectClass::FailurePasses,
                      "failure " + std::to_string(k) + " passes verify");
      }
    }
    verdict.diagnostics.push_back("failures: all fail verify");
  }

  // Static purity check: a verifier may only read.
  {
    std::set<std::string> names;
    collect_tool_names(parsed.verify.statements, names);
    for (const std::string& name : names) {
      const env::ToolSpec* spec = environment->tools().find(name);
      if (spec && spec->mutates) {
        return reject(RejectClass::VerifyMutates,
                      "verify calls mutating tool '" + name + "'");
      }
    }
    verdict.diagnostics.push_back("purity: verify is read-only");
  }

  verdict.accepted = true;
  return verdict;
}

std::int64_t difficulty(const CatBundle& bundle) {
  return count_statements(ctl::parse(bundle.solution).statements);
}

std::pair<std::vector<CatBundle>, FilterStats> filter_batch(
    const std::vector<CatBundle>& bundles, FilterVariant variant, int workers) {
  std::vector<Verdict> verdicts(bundles.size());
  util::parallel_for(bundles.size(), static_cast<unsigned>(workers < 1 ? 1 : workers),
                     [&](std::size_t k) { verdicts[k] = validate(bundles[k], variant); });

  FilterStats stats;
  stats.total = static_cast<std::int64_t>(bundles.size());
  for (RejectClass c :
       {RejectClass::Unparsable, RejectClass::VerifyUnrunnable, RejectClass::SolutionFails,
        RejectClass::FailurePasses, RejectClass::NoopPasses, RejectClass::VerifyMutates}) {
    stats.reject_counts[to_string(c)] = 0;
  }

  std::vector<CatBundle> accepted;
  for (std::size_t k = 0; k < bundles.size(); ++k) {
    if (verdicts[k].accepted) {
      accepted.push_back(bundles[k]);
      stats.accepted += 1;
      // VerifyOnly can accept bundles whose solution never parsed; bin those
      // at zero so the histogram still sums to the accepted count.
      std::int64_t bin = 0;
      try {
        bin = difficulty(bundles[k]);
      } catch (const ctl::SyntaxError&) {
      }
      stats.difficulty_histogram[bin] += 1;
    } else {
      stats.reject_counts[to_string(*verdicts[k].reject_class)] += 1;
    }
  }
  stats.pass_rate = stats.total == 0
                        ? 0.0
                        : static_cast<double>(stats.accepted) /
                              static_cast<double>(stats.total);
  return {std::move(accepted), stats};
}

std::vector<std::string> lint_instruction(const CatBundle& bundle) {
  std::vector<std::string> missing;
  ctl::Program verify;
  try {
    verify = ctl::parse(bundle.verify);
  } catch (const ctl::SyntaxError&) {
    return missing;  // validation reports unparsable bundles already
  }
  std::vector<std::string> literals;
  collect_string_literals(verify.statements, literals);
  std::set<std::string> reported;
  for (const std::string& lit : literals) {
    if (!looks_like_id(lit)) continue;
    if (bundle.instruction.find(lit) != std::string::npos) continue;
    if (reported.insert(lit).second) missing.push_back(lit);
  }
  return missing;
}

std::string filter_stats_json(const FilterStats& stats) {
  nlohmann::json j;
  j["total"] = stats.total;
  j["accepted"] = stats.accepted;
  j["pass_rate"] = stats.pass_rate;
  nlohmann::json rejects = nlohmann::json::object();
  for (const auto& [cls, count] : stats.reject_counts) rejects[cls] = count;
  j["reject_counts"] = std::move(rejects);
  nlohmann::json histogram = nlohmann::json::object();
  for (const auto& [difficulty, count] : stats.difficulty_histogram) {
    histogram[std::to_string(difficulty)] = count;
  }
  j["difficulty_histogram"] = std::move(histogram);
  return j.dump();
}

FilterStats filter_stats_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw std::runtime_error("filter stats are not a JSON object");
  }
  for (const char* field : {"total", "accepted", "pass_rate", "reject_counts",
                            "difficulty_histogram"}) {
    if (!j.contains(field)) {
      throw std::runtime_error(std::string("filter stats missing field '") + field + "'");
    }
  }
  FilterStats stats;
  stats.total = j["total"].get<std::int64_t>();
  stats.accepted = j["accepted"].get<std::int64_t>();
  stats.pass_rate = j["pass_rate"].get<double>();
  for (const auto& [cls, count] : j["reject_counts"].items()) {
    stats.reject_counts[cls] = count.get<std::int64_t>();
  }
  for (const auto& [difficulty, count] : j["difficulty_histogram"].items()) {
    stats.difficulty_histogram[std::stoll(difficulty)] = count.get<std::int64_t>();
  }
  return stats;
}

}  // namespace catforge::cat
