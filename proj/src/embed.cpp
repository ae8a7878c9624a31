#include "pgorder/embed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/hash.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

namespace {

std::vector<std::string> word_tokens(std::string_view sentence) {
  std::vector<std::string> words;
  if (sentence.find_first_not_of(" \t\r\n") == std::string_view::npos) return words;
  for (auto& tok : tokenize(sentence)) {
    const auto c = static_cast<unsigned char>(tok.surface.front());
    if (std::isalnum(c) || c >= 0x80) words.push_back(std::move(tok.normalized));
  }
  return words;
}

void add_feature(std::vector<double>& v, std::string_view feature, std::uint64_t seed) {
  const std::uint64_t h = fnv1a64(feature, seed);
  const auto bucket = static_cast<std::size_t>(h % v.size());
  v[bucket] += ((h >> 63) != 0U) ? -1.0 : 1.0;
}

void normalize_or_fallback(std::vector<double>& v, std::string_view sentence, std::uint64_t seed) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) {
    v[fnv1a64(sentence, seed ^ 0x5bd1e995ULL) % v.size()] = 1.0;
    return;
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

void require_dim(int dim) {
  if (dim < 8) throw std::invalid_argument("embedding dimension must be at least 8");
}

}  // namespace

SentenceEmbedding embed_hash(std::string_view sentence, int dim, std::uint64_t seed) {
  require_dim(dim);
  SentenceEmbedding e;
  e.vector.assign(static_cast<std::size_t>(dim), 0.0);
  for (const auto& w : word_tokens(sentence)) add_feature(e.vector, w, seed);
  normalize_or_fallback(e.vector, sentence, seed);
  return e;
}

SentenceEmbedding embed_token_windows(std::string_view sentence, int dim, std::uint64_t seed,
                                      int window) {
  require_dim(dim);
  if (window < 1) throw std::invalid_argument("window must be positive");
  SentenceEmbedding e;
  e.vector.assign(static_cast<std::size_t>(dim), 0.0);
  const auto words = word_tokens(sentence);
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t start = 0; start < words.size(); ++start) {
    std::string joined;
    for (std::size_t i = start; i < std::min(words.size(), start + w); ++i) {
      if (!joined.empty()) joined += ' ';
      joined += words[i];
    }
    const auto part = embed_hash(joined, dim, seed);
    for (std::size_t i = 0; i < e.vector.size(); ++i) e.vector[i] += part.vector[i];
    if (start + w >= words.size()) break;
  }
  normalize_or_fallback(e.vector, sentence, seed);
  return e;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine similarity is undefined for a zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double cosine_similarity(const SentenceEmbedding& a, const SentenceEmbedding& b) {
  return cosine_similarity(a.vector, b.vector);
}

bool EmbeddingTable::contains(const std::string& story_id, int sentence_index) const {
  return rows_.contains({story_id, sentence_index});
}

const SentenceEmbedding& EmbeddingTable::at(const std::string& story_id, int sentence_index) const {
  auto it = rows_.find({story_id, sentence_index});
  if (it == rows_.end()) {
    throw Error("no embedding for story '" + story_id + "' sentence " +
                std::to_string(sentence_index));
  }
  return it->second;
}

void EmbeddingTable::insert(const std::string& story_id, int sentence_index,
                            SentenceEmbedding embedding) {
  if (embedding.dim() != dim_) {
    throw Error("embedding for story '" + story_id + "' sentence " +
                std::to_string(sentence_index) + " has dimension " +
                std::to_string(embedding.dim()) + ", table expects " + std::to_string(dim_));
  }
  rows_[{story_id, sentence_index}] = std::move(embedding);
}

EmbeddingTable parse_embedding_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim=", 0) != 0) {
    throw Error("embedding file: missing 'dim=<d>' header");
  }
  int dim = 0;
  {
    auto rest = std::string_view(line).substr(4);
    auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), dim);
    if (ec != std::errc() || dim <= 0) throw Error("embedding file: bad header '" + line + "'");
  }
  EmbeddingTable table(dim);
  for (int line_no = 2; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw Error("embedding file line " + std::to_string(line_no) +
                  ": expected story_id<TAB>index<TAB>values");
    }
    const std::string id = line.substr(0, t1);
    int index = 0;
    {
      auto [p, ec] = std::from_chars(line.data() + t1 + 1, line.data() + t2, index);
      if (ec != std::errc() || p != line.data() + t2) {
        throw Error("embedding file line " + std::to_string(line_no) + ": bad sentence index");
      }
    }
    SentenceEmbedding e;
    e.source = EmbeddingSource::File;
    const char* p = line.data() + t2 + 1;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double v = 0.0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) {
        throw Error("embedding file line " + std::to_string(line_no) + ": bad number");
      }
      if (!std::isfinite(v)) {
        throw Error("embedding file line " + std::to_string(line_no) + ": non-finite value");
      }
      e.vector.push_back(v);
      p = next;
    }
    if (e.dim() != dim) {
      throw Error("embedding file line " + std::to_string(line_no) + " (story '" + id +
                  "', sentence " + std::to_string(index) + "): " + std::to_string(e.dim()) +
                  " values, header declares " + std::to_string(dim));
    }
    table.insert(id, index, std::move(e));
  }
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  return parse_embedding_table(in);
}

void write_embedding_table(std::ostream& out, const EmbeddingTable& table) {
  out << "dim=" << table.dim() << '\n';
  char buf[64];
  for (const auto& [key, e] : table.rows()) {
    out << key.first << '\t' << key.second << '\t';
    for (std::size_t i = 0; i < e.vector.size(); ++i) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), e.vector[i]);
      if (i > 0) out << ' ';
      out.write(buf, p - buf);
    }
    out << '\n';
  }
}

std::unique_ptr<Embedder> make_embedder(std::string_view spec, int dim, std::uint64_t seed) {
  if (spec == "hash") return std::make_unique<HashEmbedder>(dim, seed);
  if (spec == "window") return std::make_unique<WindowEmbedder>(dim, seed);
  if (spec.rfind("file:", 0) == 0) {
    auto table = load_embedding_table(std::string(spec.substr(5)));
    return std::make_unique<FileEmbedder>(std::move(table));
  }
  throw std::invalid_argument("unknown embedder '" + std::string(spec) +
                              "' (expected hash, window or file:PATH)");
}

}  // namespace pgorder
