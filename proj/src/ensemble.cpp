#include "pgorder/ensemble.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "pgorder/error.hpp"

namespace pgorder {

PairVoteMatrix::PairVoteMatrix(int n, int voters)
    : n_(n), voters_(voters), votes_(static_cast<std::size_t>(n * n), 0) {
  if (n < 0 || voters < 0) throw std::invalid_argument("negative vote matrix dimensions");
}

void PairVoteMatrix::validate() const {
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0) throw Error("vote matrix diagonal is not zero");
    for (int j = 0; j < n_; ++j) {
      const int v = (*this)(i, j);
      if (v < 0 || v > voters_) throw Error("vote count out of range");
      if (i != j && v + (*this)(j, i) != voters_) {
        throw Error("votes for pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") do not sum to the number of voters");
      }
    }
  }
}

PairVoteMatrix pair_votes(std::span<const Ordering> orderings) {
  if (orderings.empty()) throw std::invalid_argument("pair_votes needs at least one ordering");
  const int n = orderings.front().size();
  PairVoteMatrix votes(n, static_cast<int>(orderings.size()));
  for (const auto& o : orderings) {
    if (o.size() != n) throw std::invalid_argument("orderings have different lengths");
    require_permutation(o.rank, "input ordering");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (o.rank[i] < o.rank[j]) ++votes(i, j);
      }
    }
  }
  return votes;
}

long pair_score(const PairVoteMatrix& votes, const Ordering& ordering) {
  if (ordering.size() != votes.n()) throw std::invalid_argument("ordering length mismatch");
  long score = 0;
  for (int i = 0; i < votes.n(); ++i) {
    for (int j = 0; j < votes.n(); ++j) {
      if (ordering.rank[i] < ordering.rank[j]) score += votes(i, j);
    }
  }
  return score;
}

namespace {

Ordering exhaustive_scan(const PairVoteMatrix& votes) {
  const int n = votes.n();
  std::vector<int> seq(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) seq[i] = i;
  std::vector<int> best = seq;
  long best_score = std::numeric_limits<long>::min();
  // next_permutation visits sequences in lexicographic order, so the first
  // maximum found is the lexicographically smallest one.
  do {
    long score = 0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) score += votes(seq[a], seq[b]);
    }
    if (score > best_score) {
      best_score = score;
      best = seq;
    }
  } while (std::next_permutation(seq.begin(), seq.end()));
  return Ordering::from_sequence(best);
}

// suffix[S] = best score obtainable by ordering the complement of S after the
// already-placed set S. Reconstruction picks the smallest sentence that
// attains the optimum at every position.
Ordering subset_program(const PairVoteMatrix& votes) {
  const int n = votes.n();
  const unsigned full = (1U << n) - 1U;
  std::vector<long> suffix(static_cast<std::size_t>(full) + 1, 0);
  // gain(j, S): votes won by j against every sentence not in S and not j.
  auto gain = [&](int j, unsigned placed) {
    long g = 0;
    for (int i = 0; i < n; ++i) {
      if (i != j && !(placed & (1U << i))) g += votes(j, i);
    }
    return g;
  };
  for (unsigned s = full; s-- > 0;) {
    long best = std::numeric_limits<long>::min();
    for (int j = 0; j < n; ++j) {
      if (s & (1U << j)) continue;
      best = std::max(best, gain(j, s) + suffix[s | (1U << j)]);
    }
    suffix[s] = best;
  }
  std::vector<int> seq;
  unsigned placed = 0;
  for (int pos = 0; pos < n; ++pos) {
    for (int j = 0; j < n; ++j) {
      if (placed & (1U << j)) continue;
      if (gain(j, placed) + suffix[placed | (1U << j)] == suffix[placed]) {
        seq.push_back(j);
        placed |= 1U << j;
        break;
      }
    }
  }
  return Ordering::from_sequence(seq);
}

}  // namespace

Ordering majority_order(const PairVoteMatrix& votes, MajorityOptions options) {
  votes.validate();
  if (votes.n() > kMaxExactAggregation) {
    if (options.allow_heuristic) return greedy_majority_order(votes);
    throw Error("majority aggregation over " + std::to_string(votes.n()) +
                " sentences exceeds the exact limit of " + std::to_string(kMaxExactAggregation) +
                "; enable the greedy heuristic to aggregate longer stories");
  }
  if (votes.n() == 0) return Ordering{};
  return options.exhaustive_scan ? exhaustive_scan(votes) : subset_program(votes);
}

Ordering greedy_majority_order(const PairVoteMatrix& votes) {
  const int n = votes.n();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<int> seq;
  for (int pos = 0; pos < n; ++pos) {
    int best = -1;
    long best_margin = std::numeric_limits<long>::min();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      long margin = 0;
      for (int i = 0; i < n; ++i) {
        if (i != j && !used[i]) margin += votes(j, i) - votes(i, j);
      }
      if (margin > best_margin) {
        best_margin = margin;
        best = j;
      }
    }
    used[best] = 1;
    seq.push_back(best);
  }
  return Ordering::from_sequence(seq);
}

void write_orderings(std::ostream& out, std::span<const StoryOrdering> orderings) {
  for (const auto& o : orderings) {
    out << o.story_id << '\t';
    for (int i = 0; i < o.ordering.size(); ++i) out << (i ? " " : "") << o.ordering.rank[i];
    out << '\n';
  }
}

std::vector<StoryOrdering> parse_orderings(std::istream& in) {
  std::vector<StoryOrdering> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error("orderings line " + std::to_string(line_no) + ": expected story_id<TAB>ranks");
    }
    StoryOrdering so;
    so.story_id = line.substr(0, tab);
    std::istringstream ranks(line.substr(tab + 1));
    std::vector<int> rank;
    std::string field;
    while (ranks >> field) {
      std::size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size()) {
        throw Error("orderings line " + std::to_string(line_no) + ": bad rank '" + field + "'");
      }
      rank.push_back(v);
    }
    if (rank.empty() || !is_permutation(rank)) {
      throw Error("orderings line " + std::to_string(line_no) + ": ranks are not a permutation");
    }
    so.ordering = Ordering::from_rank(std::move(rank));
    out.push_back(std::move(so));
  }
  return out;
}

std::vector<StoryOrdering> load_orderings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open orderings file " + path.string());
  try {
    return parse_orderings(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<StoryOrdering> fuse_orderings(std::span<const std::vector<StoryOrdering>> inputs,
                                          MajorityOptions options) {
  if (inputs.empty()) throw std::invalid_argument("no orderings to fuse");
  std::vector<std::map<std::string, const Ordering*>> index(inputs.size());
  for (std::size_t f = 0; f < inputs.size(); ++f) {
    for (const auto& so : inputs[f]) {
      if (!index[f].emplace(so.story_id, &so.ordering).second) {
        throw Error("orderings input " + std::to_string(f + 1) + " repeats story '" + so.story_id + "'");
      }
    }
    if (index[f].size() != index[0].size()) {
      throw Error("orderings input " + std::to_string(f + 1) + " covers a different set of stories");
    }
  }
  std::vector<StoryOrdering> out;
  out.reserve(inputs[0].size());
  for (const auto& first : inputs[0]) {
    std::vector<Ordering> votes;
    for (std::size_t f = 0; f < inputs.size(); ++f) {
      auto it = index[f].find(first.story_id);
      if (it == index[f].end()) {
        throw Error("orderings input " + std::to_string(f + 1) + " lacks story '" + first.story_id + "'");
      }
      if (it->second->size() != first.ordering.size()) {
        throw Error("story '" + first.story_id + "' has different lengths across orderings inputs");
      }
      votes.push_back(*it->second);
    }
    if (votes.size() == 1) {
      out.push_back({first.story_id, Ordering::from_rank(first.ordering.rank)});
      continue;
    }
    out.push_back({first.story_id, majority_order(pair_votes(votes), options)});
  }
  return out;
}

}  // namespace pgorder
