#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pgorder {

enum class EmbeddingSource { Hash, File };

struct SentenceEmbedding {
  std::vector<double> vector;
  EmbeddingSource source = EmbeddingSource::Hash;

  int dim() const { return static_cast<int>(vector.size()); }
};

/// Signed feature hashing of lowercased word tokens into `dim` buckets,
/// L2-normalized. Punctuation is ignored. If every bucket cancels to zero the
/// result is the unit vector of a bucket chosen by hashing the whole sentence.
SentenceEmbedding embed_hash(std::string_view sentence, int dim, std::uint64_t seed);

/// Sum of embed_hash over sliding windows of `window` consecutive word
/// tokens, L2-normalized. Stand-in for a recurrent word-level sentence
/// encoder in ablations.
SentenceEmbedding embed_token_windows(std::string_view sentence, int dim, std::uint64_t seed,
                                      int window = 3);

// Throws std::invalid_argument on dimension mismatch or a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const SentenceEmbedding& a, const SentenceEmbedding& b);

class EmbeddingTable {
 public:
  explicit EmbeddingTable(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  bool contains(const std::string& story_id, int sentence_index) const;
  // Throws Error naming the key when absent.
  const SentenceEmbedding& at(const std::string& story_id, int sentence_index) const;
  void insert(const std::string& story_id, int sentence_index, SentenceEmbedding embedding);

  const std::map<std::pair<std::string, int>, SentenceEmbedding>& rows() const { return rows_; }

 private:
  int dim_;
  std::map<std::pair<std::string, int>, SentenceEmbedding> rows_;
};

/// Header "dim=<d>", then "story_id<TAB>sentence_index<TAB>f1 f2 ... fd".
EmbeddingTable parse_embedding_table(std::istream& in);
EmbeddingTable load_embedding_table(const std::filesystem::path& path);
// Shortest round-trip decimal representation; reloading is bitwise exact.
void write_embedding_table(std::ostream& out, const EmbeddingTable& table);

/// Source of sentence vectors for the pipeline.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  // `sentence_index` is the sentence's index within the stored story.
  virtual SentenceEmbedding embed(const std::string& story_id, int sentence_index,
                                  std::string_view text) const = 0;
};

class HashEmbedder final : public Embedder {
 public:
  HashEmbedder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
  int dim() const override { return dim_; }
  SentenceEmbedding embed(const std::string&, int, std::string_view text) const override {
    return embed_hash(text, dim_, seed_);
  }

 private:
  int dim_;
  std::uint64_t seed_;
};

class WindowEmbedder final : public Embedder {
 public:
  WindowEmbedder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}
  int dim() const override { return dim_; }
  SentenceEmbedding embed(const std::string&, int, std::string_view text) const override {
    return embed_token_windows(text, dim_, seed_);
  }

 private:
  int dim_;
  std::uint64_t seed_;
};

class FileEmbedder final : public Embedder {
 public:
  explicit FileEmbedder(EmbeddingTable table) : table_(std::move(table)) {}
  int dim() const override { return table_.dim(); }
  SentenceEmbedding embed(const std::string& story_id, int sentence_index,
                          std::string_view) const override {
    return table_.at(story_id, sentence_index);
  }

 private:
  EmbeddingTable table_;
};

/// "hash", "window" or "file:PATH".
std::unique_ptr<Embedder> make_embedder(std::string_view spec, int dim, std::uint64_t seed);

}  // namespace pgorder
