#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pgorder/corpus.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/metrics.hpp"
#include "pgorder/nn/checkpoint.hpp"
#include "pgorder/nn/model.hpp"
#include "pgorder/permutation.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

/// Anything that predicts an ordering for a presented story.
class Orderer {
 public:
  virtual ~Orderer() = default;
  virtual std::string name() const = 0;
  virtual Ordering order(const ShuffledStory& story) const = 0;
};

class ModelOrderer final : public Orderer {
 public:
  ModelOrderer(nn::Checkpoint checkpoint, std::shared_ptr<const Embedder> embedder, nn::DecodeMode decode,
               const Tagger& tagger = default_tagger());
  std::string name() const override;
  Ordering order(const ShuffledStory& story) const override;
  const nn::Checkpoint& checkpoint() const { return checkpoint_; }
  // Overrides the graph variant used at inference (see nn::require_compatible).
  void set_variant(GraphVariant variant) { checkpoint_.config.variant = variant; }

 private:
  nn::Checkpoint checkpoint_;
  std::shared_ptr<const Embedder> embedder_;
  nn::DecodeMode decode_;
  const Tagger* tagger_;
};

// Reads the answer off the applied permutation.
class OracleOrderer final : public Orderer {
 public:
  std::string name() const override { return "oracle"; }
  Ordering order(const ShuffledStory& story) const override;
};

/// Uniformly random ordering, seeded by `seed` and the story's id and text,
/// so the same story always gets the same guess.
class RandomOrderer final : public Orderer {
 public:
  explicit RandomOrderer(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "random"; }
  Ordering order(const ShuffledStory& story) const override;

 private:
  std::uint64_t seed_;
};

// Seed used to present stories[index] during evaluation.
std::uint64_t presentation_seed(std::uint64_t seed, std::size_t index);

/// Shuffles story i with presentation_seed(seed, i), orders it and scores
/// it against the gold order. Single-sentence stories count as exact with
/// tau 1. Predictions are appended to `predictions` when given.
EvalReport evaluate(const Orderer& orderer, std::span<const Story> stories, std::uint64_t seed,
                    std::vector<Ordering>* predictions = nullptr);

}  // namespace pgorder
