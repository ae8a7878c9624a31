#include "pgorder/evaluation.hpp"

#include <algorithm>
#include <random>

#include "pgorder/error.hpp"
#include "pgorder/hash.hpp"
#include "pgorder/pipeline.hpp"

namespace pgorder {

ModelOrderer::ModelOrderer(nn::Checkpoint checkpoint, std::shared_ptr<const Embedder> embedder,
                           nn::DecodeMode decode, const Tagger& tagger)
    : checkpoint_(std::move(checkpoint)), embedder_(std::move(embedder)), decode_(decode), tagger_(&tagger) {}

std::string ModelOrderer::name() const {
  return std::string(variant_name(checkpoint_.config.variant)) + "/" + decode_.str();
}

Ordering ModelOrderer::order(const ShuffledStory& story) const {
  if (story.size() == 1) return Ordering::identity(1);
  const auto sample = prepare_sample(story, *embedder_, checkpoint_.config, *tagger_);
  const auto enc = nn::grn_encode(sample, checkpoint_.params, checkpoint_.config.steps);
  return nn::pointer_decode(enc, checkpoint_.params, decode_, sample.tie_rank);
}

Ordering OracleOrderer::order(const ShuffledStory& story) const {
  return Ordering::from_rank(story.applied_permutation);
}

Ordering RandomOrderer::order(const ShuffledStory& story) const {
  std::uint64_t h = fnv1a64(story.story_id, seed_);
  for (const auto& s : story.presented) h = fnv1a64(s, h);
  std::mt19937_64 rng(h);
  auto seq = identity_permutation(story.size());
  std::shuffle(seq.begin(), seq.end(), rng);
  return Ordering::from_sequence(seq);
}

std::uint64_t presentation_seed(std::uint64_t seed, std::size_t index) { return mix_seed(seed, index); }

EvalReport evaluate(const Orderer& orderer, std::span<const Story> stories, std::uint64_t seed,
                    std::vector<Ordering>* predictions) {
  std::vector<StoryResult> results;
  results.reserve(stories.size());
  for (std::size_t i = 0; i < stories.size(); ++i) {
    const auto shuffled = shuffle_story(stories[i], presentation_seed(seed, i));
    const Ordering pred = orderer.order(shuffled);
    const Ordering gold = Ordering::from_rank(shuffled.applied_permutation);
    if (pred.size() != gold.size()) {
      throw Error(orderer.name() + " returned " + std::to_string(pred.size()) + " positions for story '" +
                  shuffled.story_id + "' with " + std::to_string(gold.size()) + " sentences");
    }
    if (gold.size() < 2) {
      results.push_back({shuffled.story_id, 1.0, true});
    } else {
      results.push_back({shuffled.story_id, kendall_tau(pred, gold), pred == gold});
    }
    if (predictions) predictions->push_back(pred);
  }
  return summarize(std::move(results));
}

}  // namespace pgorder
