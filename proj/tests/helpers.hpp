#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pgorder/corpus.hpp"
#include "pgorder/permutation.hpp"

namespace testing {

inline std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[i] = i;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Pairs (i, j) ranked in opposite relative order by a and b.
inline long brute_inversions(const std::vector<int>& a, const std::vector<int>& b) {
  long inv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] < a[j]) != (b[i] < b[j])) ++inv;
    }
  }
  return inv;
}

inline pgorder::Story make_story(std::string id, std::vector<std::string> sentences) {
  const int n = static_cast<int>(sentences.size());
  return pgorder::Story{std::move(id), std::move(sentences), pgorder::identity_permutation(n)};
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  auto p = pgorder::identity_permutation(n);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Random short stories over a small vocabulary, so entities recur.
inline std::vector<pgorder::Story> random_stories(int count, int min_n, int max_n, std::uint64_t seed) {
  static const std::vector<std::string> subjects{"Tom", "Anna", "the dog", "the teacher", "he", "she", "they"};
  static const std::vector<std::string> verbs{"found", "washed", "liked", "carried", "saw", "lost"};
  static const std::vector<std::string> objects{"the ball", "a cake", "the car", "it", "the dog", "the book",
                                                "them", "a letter", "the garden"};
  static const std::vector<std::string> tails{"", " at the park", " in the kitchen", " quickly", " with Anna"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<pgorder::Story> out;
  for (int s = 0; s < count; ++s) {
    const int n = std::uniform_int_distribution<int>(min_n, max_n)(rng);
    std::vector<std::string> sentences;
    for (int i = 0; i < n; ++i) {
      std::string subj = pick(subjects);
      subj[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(subj[0])));
      sentences.push_back(subj + " " + pick(verbs) + " " + pick(objects) + pick(tails) + " " +
                          std::to_string(i) + ".");
    }
    out.push_back(make_story("r" + std::to_string(s), std::move(sentences)));
  }
  return out;
}

}  // namespace testing
