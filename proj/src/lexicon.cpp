#include <cctype>
#include <fstream>
#include <sstream>

#include "pgorder/error.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

namespace detail {
std::string_view builtin_lexicon_text();
}

namespace {

LexTag parse_lex_tag(std::string_view s, int line_no) {
  if (s == "noun") return LexTag::Noun;
  if (s == "person") return LexTag::Person;
  if (s == "verb") return LexTag::Verb;
  if (s == "other") return LexTag::Other;
  throw Error("lexicon line " + std::to_string(line_no) + ": unknown tag '" + std::string(s) + "'");
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

LexiconTagger LexiconTagger::parse(std::istream& in) {
  LexiconTagger tagger;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error("lexicon line " + std::to_string(line_no) + ": expected word<TAB>tag");
    }
    std::string word = line.substr(0, tab);
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    tagger.set(std::move(word), parse_lex_tag(std::string_view(line).substr(tab + 1), line_no));
  }
  return tagger;
}

LexiconTagger LexiconTagger::builtin() {
  std::istringstream in{std::string(detail::builtin_lexicon_text())};
  return parse(in);
}

LexiconTagger LexiconTagger::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file " + path.string());
  return parse(in);
}

void LexiconTagger::set(std::string word, LexTag tag) { entries_[std::move(word)] = tag; }

std::optional<LexTag> LexiconTagger::lookup(std::string_view normalized) const {
  if (auto it = entries_.find(std::string(normalized)); it != entries_.end()) return it->second;
  // Plural nouns and third-person verbs fold onto their stem.
  for (std::string_view suffix : {"es", "s"}) {
    if (ends_with(normalized, suffix)) {
      auto stem = normalized.substr(0, normalized.size() - suffix.size());
      auto it = entries_.find(std::string(stem));
      if (it != entries_.end() && it->second != LexTag::Other) return it->second;
    }
  }
  return std::nullopt;
}

void LexiconTagger::tag(std::span<Token> tokens) const {
  for (auto& tok : tokens) {
    tok.person = false;
    const auto first = static_cast<unsigned char>(tok.surface.front());
    if (is_pronoun(tok.normalized)) {
      tok.tag = CoarseTag::Pronoun;
      continue;
    }
    if (!std::isalpha(first) && first < 0x80) {
      tok.tag = CoarseTag::Other;
      continue;
    }
    if (auto lex = lookup(tok.normalized)) {
      switch (*lex) {
        case LexTag::Noun: tok.tag = CoarseTag::Noun; break;
        case LexTag::Person: tok.tag = CoarseTag::Noun; tok.person = true; break;
        case LexTag::Verb: tok.tag = CoarseTag::Verb; break;
        case LexTag::Other: tok.tag = CoarseTag::Other; break;
      }
      continue;
    }
    const std::string_view w = tok.normalized;
    if (ends_with(w, "ly")) {
      tok.tag = CoarseTag::Other;
    } else if (ends_with(w, "ed") || ends_with(w, "ing")) {
      tok.tag = CoarseTag::Verb;
    } else if (std::isupper(first)) {
      tok.tag = CoarseTag::Noun;
      tok.person = true;
    } else if (ends_with(w, "tion") || ends_with(w, "ment") || ends_with(w, "ness") ||
               ends_with(w, "ity") || ends_with(w, "ship") || ends_with(w, "hood") ||
               ends_with(w, "ism") || ends_with(w, "ist") || ends_with(w, "er")) {
      tok.tag = CoarseTag::Noun;
    } else {
      tok.tag = CoarseTag::Other;
    }
  }
}

const Tagger& default_tagger() {
  static const LexiconTagger tagger = LexiconTagger::builtin();
  return tagger;
}

}  // namespace pgorder
