#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "pgorder/corpus.hpp"

namespace pgorder {

namespace {

// Every word here is covered by the bundled lexicon, so tagging and
// coreference behave predictably on generated text.
constexpr std::array kNames{"Tom",  "Anna", "John", "Mary", "Mike", "Sarah", "David", "Emma",
                            "Lucy", "Kate", "Jack", "Amy",  "Ben",  "Lisa",  "Sam",   "Jane",
                            "Bob",  "Alice", "Peter", "Nina", "Carl", "Rosa", "Tina",  "Dan"};
constexpr std::array kObjects{"bike",  "ball",  "cake",   "book",   "phone",  "gift",  "box",
                              "cup",   "letter", "kite",  "guitar", "camera", "ticket", "hat",
                              "coat",  "lamp",  "clock",  "bottle", "basket", "pizza", "toy",
                              "doll",  "map",   "umbrella", "watch", "ring",  "wallet", "key"};
constexpr std::array kPlaces{"park",   "store", "school", "beach",  "lake",   "house",
                             "garden", "kitchen", "library", "museum", "market", "office",
                             "farm",   "hotel", "station", "cafe",   "mall",   "yard"};
constexpr std::array kVerbs{"bought", "found", "took",    "carried", "cleaned", "washed",
                            "fixed",  "opened", "painted", "kept",    "brought", "picked",
                            "moved",  "dropped", "used",   "showed",  "wanted",  "ordered",
                            "borrowed", "noticed", "packed", "chose",  "held",    "checked"};
constexpr std::array kMiddleMarkers{"Then", "Next", "After that", "Later", "Soon", "Afterwards"};

std::string marker_for(int position, int n) {
  if (position == 0) return "First";
  if (position == n - 1) return "Finally";
  return kMiddleMarkers[static_cast<std::size_t>(position - 1)];
}

template <typename Pool>
std::string pick(const Pool& pool, int cap, std::mt19937_64& rng) {
  const int size = std::clamp(cap, 2, static_cast<int>(pool.size()));
  return pool[std::uniform_int_distribution<int>(0, size - 1)(rng)];
}

}  // namespace

std::vector<Story> generate_synthetic(int n_stories, int n_sentences, int vocab_size,
                                      std::uint64_t seed) {
  if (n_sentences < 2 || n_sentences > 8) {
    throw std::invalid_argument("synthetic stories need 2..8 sentences");
  }
  if (n_stories < 0) throw std::invalid_argument("n_stories must be non-negative");

  std::mt19937_64 rng(seed);
  std::vector<Story> stories;
  stories.reserve(static_cast<std::size_t>(n_stories));
  for (int s = 0; s < n_stories; ++s) {
    const std::string name = pick(kNames, vocab_size, rng);
    const std::string object = pick(kObjects, vocab_size, rng);
    const bool female = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
    const std::string pron = female ? "she" : "he";
    const std::string poss = female ? "her" : "his";

    // The protagonist is named in sentence 0 and in one later sentence; a
    // pronoun refers back to it in sentence 1.
    const int named_again = std::uniform_int_distribution<int>(1, n_sentences - 1)(rng);

    Story story;
    char id[32];
    std::snprintf(id, sizeof(id), "syn%05d", s);
    story.id = id;
    for (int pos = 0; pos < n_sentences; ++pos) {
      const std::string marker = marker_for(pos, n_sentences);
      const std::string verb = pick(kVerbs, vocab_size, rng);
      const std::string place = pick(kPlaces, vocab_size, rng);
      std::string sentence;
      if (pos == 0) {
        sentence = marker + ", " + name + " " + verb + " a " + object + " at the " + place + ".";
      } else {
        const bool named = pos == named_again && pos != 1;
        const std::string subject = named ? name : pron;
        switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
          case 0:
            sentence = marker + ", " + subject + " " + verb + " the " + object + ".";
            break;
          case 1:
            sentence = marker + ", " + subject + " " + verb + " it at the " + place + ".";
            break;
          default:
            sentence = marker + ", " + subject + " " + verb + " " + poss + " " +
                       pick(kObjects, vocab_size, rng) + ".";
            break;
        }
        if (pos == named_again && pos == 1) {
          // Keep the pronoun in sentence 1 and name the protagonist as the object's owner.
          sentence.pop_back();
          sentence += " for " + name + ".";
        }
      }
      story.sentences.push_back(std::move(sentence));
    }
    story.gold_order = identity_permutation(n_sentences);
    stories.push_back(std::move(story));
  }
  return stories;
}

}  // namespace pgorder
