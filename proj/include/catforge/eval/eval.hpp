#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catforge/cat/validate.hpp"

namespace catforge::eval {

class EmptyMatrix : public std::runtime_error {
 public:
  explicit EmptyMatrix(const std::string& detail)
      : std::runtime_error("EmptyMatrix: " + detail) {}
};

class MissingOracle : public std::runtime_error {
 public:
  explicit MissingOracle(const std::string& detail)
      : std::runtime_error("MissingOracle: " + detail) {}
};

// Rows are tasks, columns are independent trials (distinct seeds), cells
// are 0/1 rewards. Rectangular by construction.
struct TrialMatrix {
  std::vector<std::string> tasks;
  std::vector<std::vector<int>> cells;
};

// One (task, seed, reward) record per trial; rows sorted by task, cells by
// seed. Throws EmptyMatrix when empty, ragged, or a seed repeats in a row.
TrialMatrix matrix_from_outcomes(
    const std::vector<std::tuple<std::string, std::uint64_t, int>>& outcomes);

// Mean reward over every cell.
double pass_at_1(const TrialMatrix& matrix);

// Unbiased estimator over all size-k column subsets:
// mean over rows of 1 - C(n-s, k)/C(n, k).
double pass_at_k(const TrialMatrix& matrix, int k);

struct Confusion {
  std::int64_t tp = 0;  // filter accepted, oracle says valid
  std::int64_t tn = 0;  // filter rejected, oracle says broken
  std::int64_t fp = 0;  // filter accepted, oracle says broken
  std::int64_t fn = 0;  // filter rejected, oracle says valid
  std::int64_t total() const { return tp + tn + fp + fn; }
};

struct AuditItem {
  bool filter_accepted = false;
  std::optional<bool> oracle_valid;  // ground-truth label
};

// Throws MissingOracle when any item lacks its ground-truth label.
Confusion audit(const std::vector<AuditItem>& items);

struct ReportRow {
  std::string env;
  std::string policy;
  std::int64_t tasks = 0;
  std::int64_t trials = 0;  // per task
  double pass1 = 0.0;
  double passk = 0.0;
  int k = 1;
};

struct Report {
  std::vector<ReportRow> rows;
  std::optional<cat::FilterStats> filter;
  std::optional<Confusion> confusion;
};

// Versioned machine-readable form.
std::string report_json(const Report& report);

// Aligned text table; prints "no data" when there is nothing to show.
std::string report_table(const Report& report);

}  // namespace catforge::eval
