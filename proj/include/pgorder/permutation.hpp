#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace pgorder {

using Permutation = std::vector<int>;

bool is_permutation(std::span<const int> p);
// Throws std::invalid_argument naming `what` if p is not a permutation of 0..n-1.
void require_permutation(std::span<const int> p, std::string_view what);
Permutation identity_permutation(int n);
Permutation inverse_permutation(std::span<const int> p);

/// Predicted arrangement of one story. `rank[i]` is the output position of
/// presented sentence i; `sequence()` is the inverse view (which sentence
/// sits at each output position).
struct Ordering {
  std::vector<int> rank;
  // Log-probability of each decoding step when produced by the pointer decoder.
  std::vector<double> step_scores;

  static Ordering from_rank(std::vector<int> rank);
  static Ordering from_sequence(std::span<const int> sequence);
  static Ordering identity(int n);

  std::vector<int> sequence() const;
  int size() const { return static_cast<int>(rank.size()); }

  friend bool operator==(const Ordering& a, const Ordering& b) { return a.rank == b.rank; }
};

}  // namespace pgorder
