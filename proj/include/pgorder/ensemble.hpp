#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pgorder/permutation.hpp"

namespace pgorder {

/// votes(i, j) = number of input orderings placing sentence i before j.
class PairVoteMatrix {
 public:
  PairVoteMatrix(int n, int voters);

  int n() const { return n_; }
  int voters() const { return voters_; }
  int operator()(int i, int j) const { return votes_[static_cast<std::size_t>(i * n_ + j)]; }
  int& operator()(int i, int j) { return votes_[static_cast<std::size_t>(i * n_ + j)]; }

  // Throws Error unless votes(i,j) + votes(j,i) == voters off the diagonal
  // and the diagonal is zero.
  void validate() const;

 private:
  int n_;
  int voters_;
  std::vector<int> votes_;
};

// Throws std::invalid_argument on an empty list or differing lengths.
PairVoteMatrix pair_votes(std::span<const Ordering> orderings);

// Sum of votes(i, j) over all pairs the ordering places as i before j.
long pair_score(const PairVoteMatrix& votes, const Ordering& ordering);

inline constexpr int kMaxExactAggregation = 10;

struct MajorityOptions {
  // Above kMaxExactAggregation sentences, fall back to a greedy ordering
  // instead of failing.
  bool allow_heuristic = false;
  // Scan all n! permutations instead of the subset dynamic program.
  bool exhaustive_scan = false;
};

/// Ordering with the highest pair score; among equal scores, the one whose
/// sentence sequence is lexicographically smallest. Whenever the strict
/// pairwise majorities are acyclic this realizes every one of them.
Ordering majority_order(const PairVoteMatrix& votes, MajorityOptions options = {});

/// Repeatedly places the remaining sentence with the largest
/// (votes won - votes lost) against the other remaining sentences.
Ordering greedy_majority_order(const PairVoteMatrix& votes);

struct StoryOrdering {
  std::string story_id;
  Ordering ordering;
};

/// Orderings interchange format: one line per story,
/// "story_id<TAB>r0 r1 ... r(n-1)" where r_i is the predicted gold position
/// of presented sentence i.
void write_orderings(std::ostream& out, std::span<const StoryOrdering> orderings);
std::vector<StoryOrdering> parse_orderings(std::istream& in);
std::vector<StoryOrdering> load_orderings(const std::filesystem::path& path);

/// Per-story majority_order over several orderings files. Every file must
/// cover the same stories with the same lengths; output follows the first
/// file's story order. A single input is passed through unchanged.
std::vector<StoryOrdering> fuse_orderings(std::span<const std::vector<StoryOrdering>> inputs,
                                          MajorityOptions options = {});

}  // namespace pgorder
