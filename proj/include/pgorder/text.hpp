#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pgorder/corpus.hpp"

namespace pgorder {

enum class CoarseTag { Noun, Pronoun, Verb, Other };

// Declaration order is rank order: a lower value outranks a higher one.
enum class Role { Subject = 0, Object = 1, Other = 2 };
inline constexpr int kRoleCount = 3;

std::string_view tag_name(CoarseTag tag);
std::string_view role_name(Role role);
Role parse_role(std::string_view name);

struct Token {
  std::string surface;
  std::string normalized;  // lowercased surface
  CoarseTag tag = CoarseTag::Other;
  bool person = false;  // animate noun (person noun or proper name)
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last byte, within the sentence
};

/// Splits on whitespace; punctuation marks become single-character tokens.
/// Apostrophes and hyphens inside a word stay part of it ("didn't",
/// "well-known"). Throws std::invalid_argument on blank input.
std::vector<Token> tokenize(std::string_view sentence);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual void tag(std::span<Token> tokens) const = 0;
};

enum class LexTag { Noun, Person, Verb, Other };

/// Closed-class pronoun list, then lexicon lookup (with plural/3rd-person
/// "s" folding), then suffix rules, then capitalization (proper name).
/// Anything else is Other.
class LexiconTagger final : public Tagger {
 public:
  // Empty lexicon; only pronoun, suffix and capitalization rules apply.
  LexiconTagger() = default;

  static LexiconTagger builtin();
  // Lines are "word<TAB>tag" with tag in {noun, person, verb, other}; '#' starts a comment.
  static LexiconTagger parse(std::istream& in);
  static LexiconTagger from_file(const std::filesystem::path& path);

  void set(std::string word, LexTag tag);
  std::optional<LexTag> lookup(std::string_view normalized) const;
  std::size_t size() const { return entries_.size(); }

  void tag(std::span<Token> tokens) const override;

 private:
  std::unordered_map<std::string, LexTag> entries_;
};

const Tagger& default_tagger();

bool is_pronoun(std::string_view normalized);

void tag_pos(std::span<Token> tokens, const Tagger& tagger = default_tagger());
// tokenize + tag_pos
std::vector<Token> analyze(std::string_view sentence, const Tagger& tagger = default_tagger());

struct Substitution {
  int sentence = 0;
  int token = 0;
  std::string pronoun;
  std::string entity;  // surface form that replaced the pronoun
};

struct ResolvedStory {
  Story original;
  Story story;  // pronouns replaced
  std::vector<Substitution> substitutions;
};

/// Replaces each third-person pronoun with the nearest preceding noun that
/// agrees in number (terminal "s" = plural) and animacy (he/she/him/her/his/
/// hers need a person noun, it/its a non-person noun). The search runs
/// backward through the same sentence, then earlier sentences, in the order
/// given. Resolved pronouns become candidates for later ones. Unresolvable
/// pronouns are left alone.
ResolvedStory resolve_pronouns(const Story& story, const Tagger& tagger = default_tagger());
// Wraps a story without running the resolver.
ResolvedStory unresolved(const Story& story);

struct Mention {
  int sentence = 0;
  int token = 0;
  Role role = Role::Other;
};

struct Entity {
  std::string canonical;
  std::vector<Mention> mentions;

  // Distinct sentence indices, ascending.
  std::vector<int> sentences() const;
  // Highest-ranked role among the mentions in `sentence`; nullopt if absent.
  std::optional<Role> sentence_role(int sentence) const;
};

// Lowercased with one trailing "s" removed.
std::string canonical_entity(std::string_view surface);

/// Nouns grouped by canonical form, in order of first mention. Entities whose
/// mentions fall within a single sentence are dropped.
std::vector<Entity> extract_entities(const Story& story, const Tagger& tagger = default_tagger());
std::vector<Entity> extract_entities(const ResolvedStory& resolved,
                                     const Tagger& tagger = default_tagger());

/// Subject if the noun precedes the sentence's first verb, Object if it
/// follows a verb, Other in verbless sentences. Throws std::invalid_argument
/// if the token is not a noun.
Role assign_role(std::span<const Token> sentence, int token_index);

}  // namespace pgorder
