#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

namespace {

enum class Number { Singular, Plural };
enum class Animacy { Person, Thing, Any };

struct PronounInfo {
  std::string_view word;
  Number number;
  Animacy animacy;
};

constexpr std::array<PronounInfo, 12> kPronouns{{
    {"he", Number::Singular, Animacy::Person},
    {"she", Number::Singular, Animacy::Person},
    {"him", Number::Singular, Animacy::Person},
    {"her", Number::Singular, Animacy::Person},
    {"his", Number::Singular, Animacy::Person},
    {"hers", Number::Singular, Animacy::Person},
    {"it", Number::Singular, Animacy::Thing},
    {"its", Number::Singular, Animacy::Thing},
    {"they", Number::Plural, Animacy::Any},
    {"them", Number::Plural, Animacy::Any},
    {"their", Number::Plural, Animacy::Any},
    {"theirs", Number::Plural, Animacy::Any},
}};

const PronounInfo* find_pronoun(std::string_view normalized) {
  for (const auto& p : kPronouns) {
    if (p.word == normalized) return &p;
  }
  return nullptr;
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

Number noun_number(const Token& tok) {
  const bool proper = std::isupper(static_cast<unsigned char>(tok.surface.front()));
  if (!proper && tok.normalized.size() > 1 && tok.normalized.back() == 's') return Number::Plural;
  return Number::Singular;
}

struct Candidate {
  std::string surface;
  Number number;
  bool person;
};

bool agrees(const Candidate& c, const PronounInfo& p) {
  if (c.number != p.number) return false;
  switch (p.animacy) {
    case Animacy::Person: return c.person;
    case Animacy::Thing: return !c.person;
    case Animacy::Any: return true;
  }
  return false;
}

}  // namespace

std::string_view tag_name(CoarseTag tag) {
  switch (tag) {
    case CoarseTag::Noun: return "Noun";
    case CoarseTag::Pronoun: return "Pronoun";
    case CoarseTag::Verb: return "Verb";
    case CoarseTag::Other: return "Other";
  }
  return "?";
}

std::string_view role_name(Role role) {
  switch (role) {
    case Role::Subject: return "subject";
    case Role::Object: return "object";
    case Role::Other: return "other";
  }
  return "?";
}

Role parse_role(std::string_view name) {
  if (name == "subject") return Role::Subject;
  if (name == "object") return Role::Object;
  if (name == "other") return Role::Other;
  throw Error("unknown role '" + std::string(name) + "'");
}

bool is_pronoun(std::string_view normalized) { return find_pronoun(normalized) != nullptr; }

std::vector<Token> tokenize(std::string_view sentence) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(sentence[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_word_byte(c)) {
      while (j < n) {
        const auto d = static_cast<unsigned char>(sentence[j]);
        if (is_word_byte(d)) {
          ++j;
        } else if ((d == '\'' || d == '-') && j + 1 < n &&
                   is_word_byte(static_cast<unsigned char>(sentence[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
    }
    Token tok;
    tok.surface = std::string(sentence.substr(i, j - i));
    tok.normalized = lower(tok.surface);
    tok.begin = i;
    tok.end = j;
    tokens.push_back(std::move(tok));
    i = j;
  }
  if (tokens.empty()) throw std::invalid_argument("cannot tokenize a blank sentence");
  return tokens;
}

void tag_pos(std::span<Token> tokens, const Tagger& tagger) { tagger.tag(tokens); }

std::vector<Token> analyze(std::string_view sentence, const Tagger& tagger) {
  auto tokens = tokenize(sentence);
  tagger.tag(tokens);
  return tokens;
}

ResolvedStory resolve_pronouns(const Story& story, const Tagger& tagger) {
  ResolvedStory out;
  out.original = story;
  out.story = story;

  // Noun candidates seen so far, per sentence, keyed by token index.
  std::vector<std::map<int, Candidate>> seen(story.sentences.size());
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    const auto tokens = analyze(story.sentences[s], tagger);
    std::string rebuilt;
    std::size_t cursor = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const Token& tok = tokens[t];
      if (tok.tag == CoarseTag::Noun) {
        seen[s][static_cast<int>(t)] = Candidate{tok.surface, noun_number(tok), tok.person};
        continue;
      }
      if (tok.tag != CoarseTag::Pronoun) continue;
      const PronounInfo* info = find_pronoun(tok.normalized);
      if (info == nullptr) continue;

      const Candidate* match = nullptr;
      for (auto ss = static_cast<long>(s); ss >= 0 && match == nullptr; --ss) {
        const auto& nouns = seen[static_cast<std::size_t>(ss)];
        for (auto it = nouns.rbegin(); it != nouns.rend(); ++it) {
          if (agrees(it->second, *info)) {
            match = &it->second;
            break;
          }
        }
      }
      if (match == nullptr) continue;

      out.substitutions.push_back(
          Substitution{static_cast<int>(s), static_cast<int>(t), tok.surface, match->surface});
      rebuilt += story.sentences[s].substr(cursor, tok.begin - cursor);
      rebuilt += match->surface;
      cursor = tok.end;
      Candidate resolved = *match;
      seen[s][static_cast<int>(t)] = std::move(resolved);
    }
    if (cursor > 0) {
      rebuilt += story.sentences[s].substr(cursor);
      out.story.sentences[s] = std::move(rebuilt);
    }
  }
  return out;
}

ResolvedStory unresolved(const Story& story) { return ResolvedStory{story, story, {}}; }

std::vector<int> Entity::sentences() const {
  std::vector<int> out;
  for (const auto& m : mentions) out.push_back(m.sentence);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Role> Entity::sentence_role(int sentence) const {
  std::optional<Role> best;
  for (const auto& m : mentions) {
    if (m.sentence == sentence && (!best || m.role < *best)) best = m.role;
  }
  return best;
}

std::string canonical_entity(std::string_view surface) {
  std::string c = lower(surface);
  if (c.size() > 1 && c.back() == 's') c.pop_back();
  return c;
}

Role assign_role(std::span<const Token> sentence, int token_index) {
  if (token_index < 0 || static_cast<std::size_t>(token_index) >= sentence.size()) {
    throw std::invalid_argument("mention index out of range");
  }
  if (sentence[token_index].tag != CoarseTag::Noun) {
    throw std::invalid_argument("mention '" + sentence[token_index].surface + "' is not a noun");
  }
  auto first_verb = std::find_if(sentence.begin(), sentence.end(),
                                 [](const Token& t) { return t.tag == CoarseTag::Verb; });
  if (first_verb == sentence.end()) return Role::Other;
  return token_index < first_verb - sentence.begin() ? Role::Subject : Role::Object;
}

std::vector<Entity> extract_entities(const Story& story, const Tagger& tagger) {
  std::vector<Entity> entities;
  std::map<std::string, std::size_t> index;
  for (std::size_t s = 0; s < story.sentences.size(); ++s) {
    const auto tokens = analyze(story.sentences[s], tagger);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].tag != CoarseTag::Noun) continue;
      auto key = canonical_entity(tokens[t].surface);
      auto [it, inserted] = index.try_emplace(key, entities.size());
      if (inserted) entities.push_back(Entity{key, {}});
      entities[it->second].mentions.push_back(
          Mention{static_cast<int>(s), static_cast<int>(t), assign_role(tokens, static_cast<int>(t))});
    }
  }
  std::erase_if(entities, [](const Entity& e) { return e.sentences().size() < 2; });
  return entities;
}

std::vector<Entity> extract_entities(const ResolvedStory& resolved, const Tagger& tagger) {
  return extract_entities(resolved.story, tagger);
}

}  // namespace pgorder
