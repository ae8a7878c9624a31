#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pgorder/permutation.hpp"

namespace pgorder {

/// Number of sentence pairs placed in opposite relative order by the two
/// rank vectors. O(n log n) merge count.
long count_inversions(std::span<const int> pred_rank, std::span<const int> gold_rank);

/// tau = 1 - 2 * inversions / (n (n - 1) / 2). Throws std::invalid_argument
/// for n < 2 or mismatched lengths.
double kendall_tau(std::span<const int> pred_rank, std::span<const int> gold_rank);
double kendall_tau(const Ordering& pred, const Ordering& gold);

/// Fraction of stories whose prediction equals the gold ordering exactly.
double pmr(std::span<const Ordering> preds, std::span<const Ordering> golds);

struct StoryResult {
  std::string id;
  double tau = 0.0;
  bool exact = false;
};

struct EvalReport {
  double mean_tau = 0.0;
  double pmr = 0.0;
  int n_stories = 0;
  std::vector<StoryResult> stories;
};

EvalReport summarize(std::vector<StoryResult> stories);

struct ReportRow {
  std::string label;
  EvalReport report;
  std::string note;  // free-form trailing column, e.g. graph statistics
};

/// Markdown-style table:
///   | Method | tau | PMR | stories | notes |
/// with tau and PMR printed to 4 decimals.
void write_report_table(std::ostream& out, std::span<const ReportRow> rows);

/// One JSON object per story: {"id":..., "tau":..., "exact":...}, followed by
/// a summary object {"summary": {"label":..., "mean_tau":..., "pmr":..., "n":...}}.
void write_report_records(std::ostream& out, const EvalReport& report, const std::string& label);

}  // namespace pgorder
