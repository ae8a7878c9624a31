#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "helpers.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/error.hpp"
#include "pgorder/graph.hpp"
#include "pgorder/hash.hpp"
#include "pgorder/text.hpp"

using namespace pgorder;

namespace {

std::vector<SentenceEmbedding> hash_embeddings(const Story& story) {
  std::vector<SentenceEmbedding> out;
  for (const auto& s : story.sentences) out.push_back(embed_hash(s, 32, 0));
  return out;
}

using EdgeSet = std::set<std::pair<int, int>>;

EdgeSet edges(const SEGraph& g) { return {g.ss_edges.begin(), g.ss_edges.end()}; }

// Edge set of g relabeled through map (old index -> new index).
EdgeSet relabel(const SEGraph& g, const std::vector<int>& map) {
  EdgeSet out;
  for (auto [a, b] : g.ss_edges) out.insert(std::minmax(map[a], map[b]));
  return out;
}

std::set<std::tuple<std::string, int, Role>> entity_edges(const SEGraph& g, const std::vector<int>* map = nullptr) {
  std::set<std::tuple<std::string, int, Role>> out;
  for (const auto& e : g.se_edges) {
    out.emplace(g.entities[e.entity].canonical, map ? (*map)[e.sentence] : e.sentence, e.role);
  }
  return out;
}

// Independent statement of each structural invariant.
void check_invariants(const SEGraph& g) {
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : g.ss_edges) {
    CHECK(a >= 0);
    CHECK(a < b);
    CHECK(b < g.n_sentences);
    CHECK(seen.insert({a, b}).second);
  }
  std::set<std::pair<int, int>> se;
  for (const auto& e : g.se_edges) {
    CHECK(e.sentence >= 0);
    CHECK(e.sentence < g.n_sentences);
    CHECK(e.entity >= 0);
    CHECK(e.entity < static_cast<int>(g.entities.size()));
    CHECK(se.insert({e.sentence, e.entity}).second);
  }
  for (int k = 0; k < static_cast<int>(g.entities.size()); ++k) {
    std::set<int> sentences;
    for (const auto& e : g.se_edges) {
      if (e.entity == k) sentences.insert(e.sentence);
    }
    CHECK(sentences.size() >= 2);
  }
  CHECK_NOTHROW(g.validate());
}

}  // namespace

TEST_CASE("pruned graph small cases") {
  const auto two = testing::make_story("t", {"A dog ran.", "A cat sat."});
  const auto g = build_pg(unresolved(two), hash_embeddings(two), 1);
  CHECK(edges(g) == EdgeSet{{0, 1}});
  CHECK_THROWS_AS(build_pg(unresolved(two), hash_embeddings(two), 2), std::invalid_argument);
  CHECK_THROWS_AS(build_pg(unresolved(two), hash_embeddings(two), 0), std::invalid_argument);
}

TEST_CASE("identical embeddings fall back to canonical order") {
  const auto story = testing::make_story("i", {"Alpha.", "Bravo.", "Charlie.", "Delta.", "Echo."});
  const std::vector<SentenceEmbedding> same(5, SentenceEmbedding{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}});
  const auto g = build_pg(unresolved(story), same, 2);
  std::vector<int> by_hash{0, 1, 2, 3, 4};
  std::sort(by_hash.begin(), by_hash.end(), [&](int a, int b) {
    return std::make_pair(fnv1a64(story.sentences[a]), a) < std::make_pair(fnv1a64(story.sentences[b]), b);
  });
  EdgeSet expected;
  for (int i = 0; i < 5; ++i) {
    int taken = 0;
    for (int j : by_hash) {
      if (j == i || taken == 2) continue;
      expected.insert(std::minmax(i, j));
      ++taken;
    }
  }
  CHECK(edges(g) == expected);
}

TEST_CASE("fully connected graphs") {
  CHECK(build_fully_connected(5).ss_edges.size() == 10);
  CHECK(build_fully_connected(5).entities.empty());
  CHECK(build_fully_connected(2).ss_edges.size() == 1);
  const auto story = testing::make_story("f", {"Tom fed the dog.", "The dog ate.", "Tom smiled."});
  CHECK(build_fully_connected(story).entities.empty());
  const auto semi = build_semi_full(resolve_pronouns(story));
  CHECK(semi.ss_edges.size() == 3);
  CHECK(semi.entities.size() == 2);
}

TEST_CASE("shared-entity graph") {
  const auto story =
      testing::make_story("s", {"Tom fed the dog.", "The cat slept.", "The dog barked.", "Rain fell."});
  const auto g = build_se_graph(unresolved(story), false);
  CHECK(edges(g) == EdgeSet{{0, 2}});
  check_invariants(g);
  const auto none = testing::make_story("n", {"The cat slept.", "Rain fell.", "A bird sang."});
  const auto e = build_se_graph(unresolved(none), false);
  CHECK(e.ss_edges.empty());
  CHECK(e.se_edges.empty());
}

TEST_CASE("coreference adds shared-entity edges") {
  const auto story = testing::make_story("c", {"Anna bought a bike.", "She rode it home.", "The road was long."});
  const auto resolved = resolve_pronouns(story);
  const auto raw = build_se_graph(resolved, false);
  const auto coref = build_se_graph(resolved, true);
  CHECK(raw.ss_edges.empty());
  CHECK(edges(coref) == EdgeSet{{0, 1}});
  CHECK(coref.ss_edges.size() > raw.ss_edges.size());
}

TEST_CASE("coreference never removes shared-entity edges") {
  for (const auto& story : testing::random_stories(300, 2, 7, 17)) {
    const auto resolved = resolve_pronouns(story);
    const auto raw = edges(build_se_graph(resolved, false));
    const auto coref = edges(build_se_graph(resolved, true));
    CHECK(std::includes(coref.begin(), coref.end(), raw.begin(), raw.end()));
  }
}

TEST_CASE("variant dispatch") {
  const auto story = testing::make_story(
      "v", {"Tom fed the dog.", "The dog ate the food.", "Tom washed the bowl.", "The bowl was clean.", "He slept."});
  const auto resolved = resolve_pronouns(story);
  const auto emb = hash_embeddings(story);
  CHECK(edges(build_variant(resolved, emb, GraphVariant::PG2)) == edges(build_pg(resolved, emb, 2)));
  CHECK(build_variant(resolved, emb, GraphVariant::SemiFullSE).ss_edges.size() == 10);
  int built = 0;
  for (auto v : all_variants()) {
    check_invariants(build_variant(resolved, emb, v));
    CHECK(parse_variant(variant_name(v)) == v);
    ++built;
  }
  CHECK(built == 7);
  CHECK_THROWS(parse_variant("pg9"));
}

TEST_CASE("pruned graph degree bounds for k=2, n=5") {
  for (const auto& story : testing::random_stories(300, 5, 5, 23)) {
    const auto g = build_pg(resolve_pronouns(story), hash_embeddings(story), 2);
    CHECK(g.ss_edges.size() >= 5);
    CHECK(g.ss_edges.size() <= 10);
    for (int d : g.ss_degree()) {
      CHECK(d >= 2);
      CHECK(d <= 4);
    }
  }
}

TEST_CASE("graph construction is permutation-equivariant") {
  // The builders see resolved text; resolution itself reads the presented
  // order, so equivariance is checked on fixed (unresolved) input.
  std::mt19937_64 rng(31);
  for (const auto& story : testing::random_stories(20, 3, 6, 41)) {
    for (auto v : all_variants()) {
      const auto base = build_variant(unresolved(story), hash_embeddings(story), v);
      for (int t = 0; t < 10; ++t) {
        // presented position p holds original sentence order[p]
        const auto order = testing::random_permutation(story.size(), rng);
        Story permuted = story;
        for (int p = 0; p < story.size(); ++p) permuted.sentences[p] = story.sentences[order[p]];
        std::vector<int> to_new(story.size());
        for (int p = 0; p < story.size(); ++p) to_new[order[p]] = p;
        const auto g = build_variant(unresolved(permuted), hash_embeddings(permuted), v);
        CHECK(edges(g) == relabel(base, to_new));
        CHECK(entity_edges(g) == entity_edges(base, &to_new));
      }
    }
  }
}

TEST_CASE("graph dump format") {
  const auto story = testing::make_story("d", {"Tom fed the dog.", "The dog barked."});
  const auto dump = graph_dump(build_se_graph(unresolved(story), false));
  CHECK(dump == "n=2\nS 0 1\nE 0 dog object\nE 1 dog subject\n");
}
