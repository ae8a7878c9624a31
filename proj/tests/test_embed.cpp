#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "pgorder/embed.hpp"
#include "pgorder/error.hpp"

using namespace pgorder;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("hash embedding is deterministic and unit length") {
  const auto a = embed_hash("Tom fed his dog.", 64, 1);
  const auto b = embed_hash("Tom fed his dog.", 64, 1);
  CHECK(a.vector == b.vector);
  CHECK(a.dim() == 64);
  CHECK(std::abs(norm(a.vector) - 1.0) <= 1e-9);
  CHECK(embed_hash("Tom fed his dog.", 64, 2).vector != a.vector);
  CHECK(std::abs(norm(embed_hash("...", 16, 0).vector) - 1.0) <= 1e-9);
  CHECK_THROWS(embed_hash("x", 4, 0));
}

TEST_CASE("word overlap raises hash cosine") {
  const auto base = embed_hash("the dog ran home fast", 256, 0);
  const auto overlap = embed_hash("the dog ran home slowly", 256, 0);
  const auto disjoint = embed_hash("a cat sat quietly inside", 256, 0);
  CHECK(cosine_similarity(base, overlap) > cosine_similarity(base, disjoint));
}

TEST_CASE("cosine similarity values") {
  const std::vector<double> v{0.3, -1.2, 4.0};
  CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  const double expected = 32.0 / (std::sqrt(14.0) * std::sqrt(77.0));
  CHECK(std::abs(cosine_similarity(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}) - expected) < 1e-12);
  CHECK(std::abs(expected - 0.974631846) < 1e-9);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), std::invalid_argument);
}

TEST_CASE("cosine properties on random vectors") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 500; ++t) {
    std::vector<double> a(7), b(7);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
    const double ab = cosine_similarity(a, b);
    CHECK(ab == cosine_similarity(b, a));
    CHECK(std::abs(ab) <= 1.0 + 1e-12);
    std::vector<double> scaled = a;
    const double c = std::exp(dist(rng) * 3.0);
    for (auto& x : scaled) x *= c;
    CHECK(std::abs(cosine_similarity(scaled, b) - ab) < 1e-9);
  }
}

TEST_CASE("embedding table parsing and round trip") {
  std::ostringstream text;
  text << "dim=768\n";
  std::mt19937_64 rng(8);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 5; ++i) {
    text << "story1\t" << i << '\t';
    for (int k = 0; k < 768; ++k) text << (k ? " " : "") << dist(rng);
    text << '\n';
  }
  std::istringstream in(text.str());
  const auto table = parse_embedding_table(in);
  CHECK(table.size() == 5);
  CHECK(table.dim() == 768);

  EmbeddingTable exact(3);
  exact.insert("s", 0, {{0.1, 1.0 / 3.0, -2.5e-300}, EmbeddingSource::File});
  exact.insert("s", 1, {{std::nextafter(1.0, 2.0), 6.02214076e23, -0.0}, EmbeddingSource::File});
  std::stringstream buf;
  write_embedding_table(buf, exact);
  const auto back = parse_embedding_table(buf);
  for (int i = 0; i < 2; ++i) {
    const auto& x = exact.at("s", i).vector;
    const auto& y = back.at("s", i).vector;
    REQUIRE(x.size() == y.size());
    CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("embedding table errors") {
  std::istringstream mixed("dim=2\na\t0\t1 2\na\t1\t1 2 3\n");
  CHECK_THROWS_WITH_AS(parse_embedding_table(mixed), doctest::Contains("a"), Error);
  EmbeddingTable t(2);
  t.insert("a", 0, {{1, 2}, EmbeddingSource::File});
  CHECK_THROWS_WITH_AS(t.at("b", 4), doctest::Contains("b"), Error);
  CHECK_THROWS(t.insert("a", 1, {{1, 2, 3}, EmbeddingSource::File}));
}

TEST_CASE("embedder factory") {
  CHECK(make_embedder("hash", 32, 0)->dim() == 32);
  CHECK(make_embedder("window", 32, 0)->dim() == 32);
  CHECK_THROWS(make_embedder("sbert", 32, 0));
  const auto w = embed_token_windows("the dog ran home", 32, 0);
  CHECK(std::abs(norm(w.vector) - 1.0) <= 1e-9);
}
