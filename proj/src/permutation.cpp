#include "pgorder/permutation.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace pgorder {

bool is_permutation(std::span<const int> p) {
  std::vector<char> seen(p.size(), 0);
  for (int v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

void require_permutation(std::span<const int> p, std::string_view what) {
  if (!is_permutation(p)) {
    throw std::invalid_argument(std::string(what) + " is not a permutation of 0.." +
                                std::to_string(static_cast<long>(p.size()) - 1));
  }
}

Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation inverse_permutation(std::span<const int> p) {
  require_permutation(p, "permutation");
  Permutation inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
  return inv;
}

Ordering Ordering::from_rank(std::vector<int> rank) {
  require_permutation(rank, "ordering rank");
  Ordering o;
  o.rank = std::move(rank);
  return o;
}

Ordering Ordering::from_sequence(std::span<const int> sequence) {
  Ordering o;
  o.rank = inverse_permutation(sequence);
  return o;
}

Ordering Ordering::identity(int n) { return from_rank(identity_permutation(n)); }

std::vector<int> Ordering::sequence() const { return inverse_permutation(rank); }

}  // namespace pgorder
