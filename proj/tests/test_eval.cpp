#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "json.hpp"

#include "catforge/eval/eval.hpp"
#include "catforge/util/rng.hpp"
#include "doctest.h"

namespace eval = catforge::eval;
using catforge::util::Rng;

namespace {

// Reference implementation: enumerate every size-k column subset and count
// rows with at least one success in it.
double brute_force_pass_at_k(const eval::TrialMatrix& matrix, int k) {
  const int trials = static_cast<int>(matrix.cells.front().size());
  double subset_count = 0.0, hit_sum = 0.0;
  for (int mask = 0; mask < (1 << trials); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
    subset_count += 1.0;
    for (const auto& row : matrix.cells) {
      bool any = false;
      for (int t = 0; t < trials; ++t) {
        if ((mask >> t & 1) && row[static_cast<std::size_t>(t)] == 1) any = true;
      }
      hit_sum += any ? 1.0 : 0.0;
    }
  }
  return hit_sum / (subset_count * static_cast<double>(matrix.cells.size()));
}

eval::TrialMatrix random_matrix(Rng& rng, int tasks, int trials) {
  eval::TrialMatrix m;
  for (int r = 0; r < tasks; ++r) {
    m.tasks.push_back("t" + std::to_string(r));
    std::vector<int> row;
    for (int c = 0; c < trials; ++c) row.push_back(rng.chance(0.4) ? 1 : 0);
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace

TEST_CASE("the single-success row gives 0.25 at k=1 and 1.0 at k=4") {
  eval::TrialMatrix m;
  m.tasks = {"only"};
  m.cells = {{1, 0, 0, 0}};
  CHECK(eval::pass_at_1(m) == doctest::Approx(0.25));
  CHECK(eval::pass_at_k(m, 1) == doctest::Approx(0.25));
  CHECK(eval::pass_at_k(m, 4) == doctest::Approx(1.0));
}

TEST_CASE("closed form matches subset enumeration on random matrices") {
  Rng rng(2024);
  for (int round = 0; round < 60; ++round) {
    const int tasks = 1 + static_cast<int>(rng.below(6));
    const int trials = 2 + static_cast<int>(rng.below(5));
    const eval::TrialMatrix m = random_matrix(rng, tasks, trials);
    double previous = 0.0;
    for (int k = 1; k <= trials; ++k) {
      const double closed = eval::pass_at_k(m, k);
      const double brute = brute_force_pass_at_k(m, k);
      CHECK(closed == doctest::Approx(brute).epsilon(1e-12));
      // More attempts never hurt.
      CHECK(closed >= previous - 1e-12);
      previous = closed;
    }
    CHECK(eval::pass_at_1(m) == doctest::Approx(eval::pass_at_k(m, 1)));
    // k = trials degenerates to "any success in the row".
    int rows_with_hit = 0;
    for (const auto& row : m.cells) {
      for (int cell : row) {
        if (cell == 1) {
          rows_with_hit += 1;
          break;
        }
      }
    }
    CHECK(eval::pass_at_k(m, trials) ==
          doctest::Approx(static_cast<double>(rows_with_hit) /
                          static_cast<double>(m.cells.size())));
  }
}

TEST_CASE("degenerate matrices are refused") {
  eval::TrialMatrix empty;
  CHECK_THROWS_AS(eval::pass_at_1(empty), eval::EmptyMatrix);
  CHECK_THROWS_AS(eval::pass_at_k(empty, 1), eval::EmptyMatrix);

  eval::TrialMatrix no_trials;
  no_trials.tasks = {"a"};
  no_trials.cells = {{}};
  CHECK_THROWS_AS(eval::pass_at_1(no_trials), eval::EmptyMatrix);

  eval::TrialMatrix ragged;
  ragged.tasks = {"a", "b"};
  ragged.cells = {{1, 0}, {1}};
  CHECK_THROWS_AS(eval::pass_at_1(ragged), eval::EmptyMatrix);

  eval::TrialMatrix ok;
  ok.tasks = {"a"};
  ok.cells = {{1, 0}};
  CHECK_THROWS_AS(eval::pass_at_k(ok, 0), eval::EmptyMatrix);
  CHECK_THROWS_AS(eval::pass_at_k(ok, 3), eval::EmptyMatrix);
}

TEST_CASE("outcome records fold into a sorted rectangular matrix") {
  const std::vector<std::tuple<std::string, std::uint64_t, int>> outcomes = {
      {"beta", 11, 0}, {"alpha", 12, 1}, {"beta", 10, 1}, {"alpha", 9, 0}};
  const eval::TrialMatrix m = eval::matrix_from_outcomes(outcomes);
  REQUIRE(m.tasks == std::vector<std::string>{"alpha", "beta"});
  // Cells are ordered by trial seed within each task.
  CHECK(m.cells[0] == std::vector<int>{0, 1});
  CHECK(m.cells[1] == std::vector<int>{1, 0});

  CHECK_THROWS_AS(eval::matrix_from_outcomes({}), eval::EmptyMatrix);
  CHECK_THROWS_AS(
      eval::matrix_from_outcomes({{"a", 1, 1}, {"a", 1, 0}}),
      eval::EmptyMatrix);
  CHECK_THROWS_AS(
      eval::matrix_from_outcomes({{"a", 1, 1}, {"a", 2, 0}, {"b", 1, 1}}),
      eval::EmptyMatrix);
}

TEST_CASE("audit counts land in the right confusion quadrants") {
  std::vector<eval::AuditItem> items;
  for (int i = 0; i < 5; ++i) items.push_back({true, true});    // TP
  for (int i = 0; i < 4; ++i) items.push_back({false, false});  // TN
  for (int i = 0; i < 3; ++i) items.push_back({true, false});   // FP
  for (int i = 0; i < 2; ++i) items.push_back({false, true});   // FN
  const eval::Confusion c = eval::audit(items);
  CHECK(c.tp == 5);
  CHECK(c.tn == 4);
  CHECK(c.fp == 3);
  CHECK(c.fn == 2);
  CHECK(c.total() == 14);

  items.push_back({true, std::nullopt});
  CHECK_THROWS_AS(eval::audit(items), eval::MissingOracle);
  CHECK(eval::audit({}).total() == 0);
}

TEST_CASE("reports render as versioned json and an aligned table") {
  eval::Report report;
  report.rows.push_back({"retail", "oracle", 25, 4, 1.0, 1.0, 4});
  report.rows.push_back({"retail", "random", 25, 4, 0.01, 0.04, 4});
  catforge::cat::FilterStats filter;
  filter.total = 40;
  filter.accepted = 30;
  filter.pass_rate = 0.75;
  filter.reject_counts["noop_passes"] = 10;
  filter.difficulty_histogram[1] = 20;
  filter.difficulty_histogram[11] = 10;
  report.filter = filter;
  report.confusion = eval::Confusion{5, 4, 3, 2};

  const auto parsed = nlohmann::json::parse(eval::report_json(report));
  CHECK(parsed.at("version").get<int>() == 1);
  REQUIRE(parsed.at("rows").size() == 2);
  CHECK(parsed.at("rows").at(0).at("pass_at").at("1").get<double>() == doctest::Approx(1.0));
  CHECK(parsed.at("rows").at(1).at("policy").get<std::string>() == "random");
  CHECK(parsed.at("filter").at("accepted").get<int>() == 30);
  CHECK(parsed.at("filter").at("difficulty_histogram").at("11").get<int>() == 10);
  CHECK(parsed.at("confusion").at("fn").get<int>() == 2);

  const std::string table = eval::report_table(report);
  CHECK(table.find("pass@1") != std::string::npos);
  CHECK(table.find("pass@4") != std::string::npos);
  CHECK(table.find("retail") != std::string::npos);
  CHECK(table.find("difficulty histogram") != std::string::npos);
  CHECK(table.find("TP 5") != std::string::npos);

  CHECK(eval::report_table({}).find("no data") == 0);
}
