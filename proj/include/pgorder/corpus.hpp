#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgorder/permutation.hpp"

namespace pgorder {

/// One story. `gold_order[i]` is the gold position of `sentences[i]`; it is
/// the identity for stories read from a gold corpus and the applied shuffle
/// for stories stored in presented order.
struct Story {
  std::string id;
  std::vector<std::string> sentences;
  Permutation gold_order;

  int size() const { return static_cast<int>(sentences.size()); }
  // Sentences arranged by gold position.
  std::vector<std::string> gold_sentences() const;
};

// Throws Error unless the story has >= min_sentences non-blank sentences and
// a valid gold order.
void validate_story(const Story& story, int min_sentences = 2);
bool has_duplicate_sentences(const Story& story);

enum class CorpusFormat { Jsonl, Tsv };
CorpusFormat parse_corpus_format(std::string_view name);

/// JSONL records are {"id": ..., "sentences": [...]} with an optional
/// "gold_order" array; "s1".."sN" keys are accepted in place of "sentences".
/// TSV lines are id<TAB>s1<TAB>...<TAB>sN. Blank lines are skipped.
/// Records with fewer than `min_sentences` sentences are rejected.
std::vector<Story> parse_corpus(std::istream& in, CorpusFormat format, int min_sentences = 2);
std::vector<Story> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                               int min_sentences = 2);
// JSONL output carries "gold_order" only when it is not the identity. TSV
// cannot carry it and requires identity gold orders.
void write_corpus(std::ostream& out, std::span<const Story> stories, CorpusFormat format);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  std::vector<Story> train;
  std::vector<Story> validation;
  std::vector<Story> test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle, then train = floor(N * r_train), validation =
/// floor(N * r_val), test takes the rest.
CorpusSplit split_corpus(std::span<const Story> stories, SplitRatios ratios, std::uint64_t seed);

struct ShuffledStory {
  std::string story_id;
  std::vector<std::string> presented;
  // presented position -> gold position
  Permutation applied_permutation;
  // presented position -> index in the source Story's sentence list
  std::vector<int> source_index;

  int size() const { return static_cast<int>(presented.size()); }
};

ShuffledStory shuffle_story(const Story& story, std::uint64_t seed);
// Treats a story's stored order as the presented order.
ShuffledStory present_as_stored(const Story& story);
std::vector<std::string> restore_gold_order(const ShuffledStory& shuffled);
// The shuffled story as a Story in presented order (gold_order = applied permutation).
Story to_story(const ShuffledStory& shuffled);

/// Stories with ordinal markers ("First", "Then", ..., "Finally"), a
/// recurring protagonist and pronouns referring back to it. `vocab_size`
/// caps how many words of each bundled word pool are drawn from.
std::vector<Story> generate_synthetic(int n_stories, int n_sentences, int vocab_size,
                                      std::uint64_t seed);

}  // namespace pgorder
