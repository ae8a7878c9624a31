#pragma once

#include <span>
#include <vector>

#include "pgorder/corpus.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/graph.hpp"
#include "pgorder/nn/model.hpp"
#include "pgorder/nn/params.hpp"
#include "pgorder/text.hpp"

namespace pgorder {

/// Text side of one presented story: resolved text, sentence vectors and graph.
struct PreparedStory {
  ResolvedStory resolved;
  std::vector<SentenceEmbedding> embeddings;
  SEGraph graph;
};

/// Runs coreference (when config.coref is set) over the presented order,
/// embeds the resolved sentences and builds config.variant. Throws Error
/// naming the story if the embedder's dimension differs from config.embed_dim.
PreparedStory prepare_story(const ShuffledStory& story, const Embedder& embedder,
                            const nn::ModelConfig& config, const Tagger& tagger = default_tagger());

/// Encoder input. The target is the inverse of the applied permutation.
nn::GraphSample to_sample(const ShuffledStory& story, const PreparedStory& prepared,
                          const nn::ModelConfig& config);
nn::GraphSample prepare_sample(const ShuffledStory& story, const Embedder& embedder,
                               const nn::ModelConfig& config, const Tagger& tagger = default_tagger());
std::vector<nn::GraphSample> prepare_samples(std::span<const ShuffledStory> stories,
                                             const Embedder& embedder, const nn::ModelConfig& config,
                                             const Tagger& tagger = default_tagger());

// Entity-table row for a canonical entity name.
int entity_bucket(const std::string& canonical, int buckets);

}  // namespace pgorder
