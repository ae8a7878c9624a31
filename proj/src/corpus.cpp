#include "pgorder/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "pgorder/error.hpp"

namespace pgorder {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Story story_from_json(const nlohmann::json& rec) {
  if (!rec.is_object()) throw Error("record is not a JSON object");
  if (!rec.contains("id")) throw Error("record has no \"id\" field");
  Story story;
  story.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
  if (rec.contains("sentences")) {
    story.sentences = rec["sentences"].get<std::vector<std::string>>();
  } else {
    for (int i = 1; rec.contains("s" + std::to_string(i)); ++i) {
      story.sentences.push_back(rec["s" + std::to_string(i)].get<std::string>());
    }
  }
  if (rec.contains("gold_order")) {
    story.gold_order = rec["gold_order"].get<std::vector<int>>();
  } else {
    story.gold_order = identity_permutation(story.size());
  }
  return story;
}

}  // namespace

std::vector<std::string> Story::gold_sentences() const {
  std::vector<std::string> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) out.at(gold_order.at(i)) = sentences[i];
  return out;
}

void validate_story(const Story& story, int min_sentences) {
  if (static_cast<int>(story.sentences.size()) < min_sentences) {
    throw Error("story '" + story.id + "' has fewer than " + std::to_string(min_sentences) +
                " sentences");
  }
  for (std::size_t i = 0; i < story.sentences.size(); ++i) {
    if (is_blank(story.sentences[i])) {
      throw Error("story '" + story.id + "' sentence " + std::to_string(i) + " is empty");
    }
  }
  if (story.gold_order.size() != story.sentences.size() || !is_permutation(story.gold_order)) {
    throw Error("story '" + story.id + "' gold_order is not a permutation of its sentences");
  }
}

bool has_duplicate_sentences(const Story& story) {
  std::set<std::string> seen;
  for (const auto& s : story.sentences) {
    if (!seen.insert(trim(s)).second) return true;
  }
  return false;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::Jsonl;
  if (name == "tsv") return CorpusFormat::Tsv;
  throw std::invalid_argument("unknown corpus format '" + std::string(name) +
                              "' (expected jsonl or tsv)");
}

std::vector<Story> parse_corpus(std::istream& in, CorpusFormat format, int min_sentences) {
  std::vector<Story> stories;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    Story story;
    try {
      if (format == CorpusFormat::Jsonl) {
        story = story_from_json(nlohmann::json::parse(line));
      } else {
        auto fields = split_tabs(line);
        story.id = fields.front();
        story.sentences.assign(fields.begin() + 1, fields.end());
        story.gold_order = identity_permutation(story.size());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error("corpus line " + std::to_string(line_no) + ": malformed record: " + e.what());
    } catch (const Error& e) {
      throw Error("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      validate_story(story, min_sentences);
    } catch (const Error& e) {
      throw Error("corpus line " + std::to_string(line_no) + ": rejected: " + e.what());
    }
    stories.push_back(std::move(story));
  }
  return stories;
}

std::vector<Story> load_corpus(const std::filesystem::path& path, CorpusFormat format,
                               int min_sentences) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return parse_corpus(in, format, min_sentences);
}

void write_corpus(std::ostream& out, std::span<const Story> stories, CorpusFormat format) {
  for (const auto& story : stories) {
    const bool identity = story.gold_order == identity_permutation(story.size());
    if (format == CorpusFormat::Jsonl) {
      nlohmann::ordered_json rec;
      rec["id"] = story.id;
      rec["sentences"] = story.sentences;
      if (!identity) rec["gold_order"] = story.gold_order;
      out << rec.dump() << '\n';
    } else {
      if (!identity) {
        throw Error("story '" + story.id + "' is not in gold order; TSV cannot record gold_order");
      }
      out << story.id;
      for (const auto& s : story.sentences) out << '\t' << s;
      out << '\n';
    }
  }
}

CorpusSplit split_corpus(std::span<const Story> stories, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be positive and sum to 1");
  }
  if (stories.size() < 3) throw Error("cannot split fewer than 3 stories");
  std::unordered_set<std::string> ids;
  for (const auto& s : stories) {
    if (!ids.insert(s.id).second) throw Error("duplicate story id '" + s.id + "'");
  }

  std::vector<std::size_t> order(stories.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double n = static_cast<double>(stories.size());
  const auto n_train = static_cast<std::size_t>(std::floor(n * ratios.train + 1e-9));
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.validation + 1e-9));

  CorpusSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Story& s = stories[order[i]];
    if (i < n_train) {
      split.train.push_back(s);
    } else if (i < n_train + n_val) {
      split.validation.push_back(s);
    } else {
      split.test.push_back(s);
    }
  }
  return split;
}

ShuffledStory shuffle_story(const Story& story, std::uint64_t seed) {
  validate_story(story, 1);
  std::vector<int> source = identity_permutation(story.size());
  std::mt19937_64 rng(seed);
  std::shuffle(source.begin(), source.end(), rng);
  ShuffledStory out;
  out.story_id = story.id;
  for (int src : source) {
    out.presented.push_back(story.sentences[src]);
    out.applied_permutation.push_back(story.gold_order[src]);
  }
  out.source_index = std::move(source);
  return out;
}

ShuffledStory present_as_stored(const Story& story) {
  ShuffledStory out;
  out.story_id = story.id;
  out.presented = story.sentences;
  out.applied_permutation = story.gold_order;
  out.source_index = identity_permutation(story.size());
  return out;
}

std::vector<std::string> restore_gold_order(const ShuffledStory& shuffled) {
  std::vector<std::string> gold(shuffled.presented.size());
  for (std::size_t p = 0; p < shuffled.presented.size(); ++p) {
    gold.at(shuffled.applied_permutation.at(p)) = shuffled.presented[p];
  }
  return gold;
}

Story to_story(const ShuffledStory& shuffled) {
  return Story{shuffled.story_id, shuffled.presented, shuffled.applied_permutation};
}

}  // namespace pgorder
