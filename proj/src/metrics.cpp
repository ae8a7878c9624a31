#include "pgorder/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace pgorder {

namespace {

long merge_count(std::vector<int>& a, std::vector<int>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = (lo + hi) / 2;
  long inv = merge_count(a, scratch, lo, mid) + merge_count(a, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      inv += static_cast<long>(mid - i);
      scratch[k++] = a[j++];
    } else {
      scratch[k++] = a[i++];
    }
  }
  while (i < mid) scratch[k++] = a[i++];
  while (j < hi) scratch[k++] = a[j++];
  for (std::size_t t = lo; t < hi; ++t) a[t] = scratch[t];
  return inv;
}

}  // namespace

long count_inversions(std::span<const int> pred_rank, std::span<const int> gold_rank) {
  if (pred_rank.size() != gold_rank.size()) {
    throw std::invalid_argument("orderings have different lengths");
  }
  require_permutation(pred_rank, "predicted ordering");
  require_permutation(gold_rank, "gold ordering");
  // Predicted ranks listed in gold order; inversions of that sequence are
  // the discordant pairs.
  std::vector<int> seq(pred_rank.size());
  for (std::size_t i = 0; i < pred_rank.size(); ++i) seq[gold_rank[i]] = pred_rank[i];
  std::vector<int> scratch(seq.size());
  return merge_count(seq, scratch, 0, seq.size());
}

double kendall_tau(std::span<const int> pred_rank, std::span<const int> gold_rank) {
  const auto n = static_cast<long>(pred_rank.size());
  if (n < 2) throw std::invalid_argument("Kendall's tau needs at least 2 items");
  const long inv = count_inversions(pred_rank, gold_rank);
  const double pairs = static_cast<double>(n * (n - 1)) / 2.0;
  return 1.0 - 2.0 * static_cast<double>(inv) / pairs;
}

double kendall_tau(const Ordering& pred, const Ordering& gold) {
  return kendall_tau(pred.rank, gold.rank);
}

double pmr(std::span<const Ordering> preds, std::span<const Ordering> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("pmr: list lengths differ");
  if (preds.empty()) throw std::invalid_argument("pmr: no stories");
  std::size_t exact = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].rank == golds[i].rank) ++exact;
  }
  return static_cast<double>(exact) / static_cast<double>(preds.size());
}

EvalReport summarize(std::vector<StoryResult> stories) {
  EvalReport r;
  r.n_stories = static_cast<int>(stories.size());
  if (!stories.empty()) {
    double tau_sum = 0.0;
    int exact = 0;
    for (const auto& s : stories) {
      tau_sum += s.tau;
      exact += s.exact ? 1 : 0;
    }
    r.mean_tau = tau_sum / r.n_stories;
    r.pmr = static_cast<double>(exact) / r.n_stories;
  }
  r.stories = std::move(stories);
  return r;
}

void write_report_table(std::ostream& out, std::span<const ReportRow> rows) {
  out << "| Method | tau | PMR | stories | notes |\n";
  out << "|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f | %.4f | %d", row.report.mean_tau, row.report.pmr,
                  row.report.n_stories);
    out << "| " << row.label << " | " << buf << " | " << row.note << " |\n";
  }
}

void write_report_records(std::ostream& out, const EvalReport& report, const std::string& label) {
  for (const auto& s : report.stories) {
    nlohmann::ordered_json rec;
    rec["id"] = s.id;
    rec["tau"] = s.tau;
    rec["exact"] = s.exact;
    out << rec.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["label"] = label;
  summary["mean_tau"] = report.mean_tau;
  summary["pmr"] = report.pmr;
  summary["n"] = report.n_stories;
  out << nlohmann::ordered_json{{"summary", summary}}.dump() << '\n';
}

}  // namespace pgorder
