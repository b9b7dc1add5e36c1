#include "catforge/eval/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace catforge::eval {

namespace {

void require_rectangular(const TrialMatrix& matrix) {
  if (matrix.cells.empty()) throw EmptyMatrix("no tasks");
  const std::size_t trials = matrix.cells.front().size();
  if (trials == 0) throw EmptyMatrix("no trials");
  for (const auto& row : matrix.cells) {
    if (row.size() != trials) throw EmptyMatrix("ragged trial rows");
  }
}

// C(n-s, k)/C(n, k) as a running product; exact at these sizes and never
// overflows.
double miss_probability(int n, int s, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) {
    const int numer = n - s - i;
    const int denom = n - i;
    if (numer <= 0) return 0.0;
    p *= static_cast<double>(numer) / static_cast<double>(denom);
  }
  return p;
}

}  // namespace

TrialMatrix matrix_from_outcomes(
    const std::vector<std::tuple<std::string, std::uint64_t, int>>& outcomes) {
  std::map<std::string, std::map<std::uint64_t, int>> grouped;
  for (const auto& [task, seed, reward] : outcomes) {
    auto& row = grouped[task];
    if (!row.emplace(seed, reward).second) {
      throw EmptyMatrix("task '" + task + "' repeats trial seed " + std::to_string(seed));
    }
  }
  TrialMatrix matrix;
  for (const auto& [task, row] : grouped) {
    matrix.tasks.push_back(task);
    std::vector<int> cells;
    cells.reserve(row.size());
    for (const auto& [seed, reward] : row) cells.push_back(reward);
    matrix.cells.push_back(std::move(cells));
  }
  require_rectangular(matrix);
  return matrix;
}

double pass_at_1(const TrialMatrix& matrix) {
  require_rectangular(matrix);
  std::int64_t hits = 0, total = 0;
  for (const auto& row : matrix.cells) {
    for (int cell : row) {
      hits += cell;
      total += 1;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double pass_at_k(const TrialMatrix& matrix, int k) {
  require_rectangular(matrix);
  const int trials = static_cast<int>(matrix.cells.front().size());
  if (k < 1 || k > trials) {
    throw EmptyMatrix("k=" + std::to_string(k) + " outside 1.." + std::to_string(trials));
  }
  double sum = 0.0;
  for (const auto& row : matrix.cells) {
    int successes = 0;
    for (int cell : row) successes += cell;
    sum += 1.0 - miss_probability(trials, successes, k);
  }
  return sum / static_cast<double>(matrix.cells.size());
}

Confusion audit(const std::vector<AuditItem>& items) {
  Confusion c;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const AuditItem& item = items[i];
    if (!item.oracle_valid.has_value()) {
      throw MissingOracle("item " + std::to_string(i) + " has no ground-truth label");
    }
    if (item.filter_accepted && *item.oracle_valid) {
      c.tp += 1;
    } else if (!item.filter_accepted && !*item.oracle_valid) {
      c.tn += 1;
    } else if (item.filter_accepted) {
      c.fp += 1;
    } else {
      c.fn += 1;
    }
  }
  return c;
}

std::string report_json(const Report& report) {
  nlohmann::json out;
  out["version"] = 1;
  out["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    out["rows"].push_back({{"env", row.env},
                           {"policy", row.policy},
                           {"tasks", row.tasks},
                           {"trials", row.trials},
                           {"pass_at", {{"1", row.pass1}, {"k", row.passk}}},
                           {"k", row.k}});
  }
  if (report.filter.has_value()) {
    nlohmann::json f;
    f["total"] = report.filter->total;
    f["accepted"] = report.filter->accepted;
    f["pass_rate"] = report.filter->pass_rate;
    f["reject_counts"] = report.filter->reject_counts;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [bin, count] : report.filter->difficulty_histogram) {
      hist[std::to_string(bin)] = count;
    }
    f["difficulty_histogram"] = hist;
    out["filter"] = f;
  }
  if (report.confusion.has_value()) {
    out["confusion"] = {{"tp", report.confusion->tp},
                        {"tn", report.confusion->tn},
                        {"fp", report.confusion->fp},
                        {"fn", report.confusion->fn}};
  }
  return out.dump(2);
}

std::string report_table(const Report& report) {
  std::ostringstream out;
  if (report.rows.empty() && !report.filter.has_value() && !report.confusion.has_value()) {
    out << "no data\n";
    return out.str();
  }
  if (!report.rows.empty()) {
    int k = report.rows.front().k;
    out << std::left << std::setw(14) << "env" << std::setw(12) << "policy" << std::right
        << std::setw(7) << "tasks" << std::setw(8) << "trials" << std::setw(9) << "pass@1"
        << std::setw(9) << ("pass@" + std::to_string(k)) << "\n";
    for (const auto& row : report.rows) {
      out << std::left << std::setw(14) << row.env << std::setw(12) << row.policy
          << std::right << std::setw(7) << row.tasks << std::setw(8) << row.trials
          << std::setw(9) << std::fixed << std::setprecision(3) << row.pass1 << std::setw(9)
          << row.passk << "\n";
    }
  }
  if (report.filter.has_value()) {
    const auto& f = *report.filter;
    out << "\nfilter: " << f.accepted << "/" << f.total << " accepted (pass rate "
        << std::fixed << std::setprecision(3) << f.pass_rate << ")\n";
    for (const auto& [name, count] : f.reject_counts) {
      if (count > 0) out << "  " << name << ": " << count << "\n";
    }
    if (!f.difficulty_histogram.empty()) {
      out << "difficulty histogram (solution statements -> tasks):\n";
      for (const auto& [bin, count] : f.difficulty_histogram) {
        out << "  " << std::setw(3) << bin << ": " << count << "\n";
      }
    }
  }
  if (report.confusion.has_value()) {
    const auto& c = *report.confusion;
    out << "\naudit: TP " << c.tp << "  TN " << c.tn << "  FP " << c.fp << "  FN " << c.fn
        << "  (n=" << c.total() << ")\n";
  }
  return out.str();
}

}  // namespace catforge::eval
