#include "pgorder/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/hash.hpp"

namespace pgorder {

PreparedStory prepare_story(const ShuffledStory& story, const Embedder& embedder,
                            const nn::ModelConfig& config, const Tagger& tagger) {
  if (embedder.dim() != config.embed_dim) {
    throw Error("story '" + story.story_id + "': embedder dimension " + std::to_string(embedder.dim()) +
                " does not match configured " + std::to_string(config.embed_dim));
  }
  const Story presented = to_story(story);
  PreparedStory out;
  out.resolved = config.coref ? resolve_pronouns(presented, tagger) : unresolved(presented);
  out.embeddings.reserve(presented.sentences.size());
  for (int i = 0; i < story.size(); ++i) {
    auto e = embedder.embed(story.story_id, story.source_index[i], out.resolved.story.sentences[i]);
    if (e.dim() != config.embed_dim) {
      throw Error("story '" + story.story_id + "' sentence " + std::to_string(story.source_index[i]) +
                  ": embedding dimension " + std::to_string(e.dim()) + " does not match configured " +
                  std::to_string(config.embed_dim));
    }
    out.embeddings.push_back(std::move(e));
  }
  out.graph = story.size() == 1 ? build_fully_connected(1)
                                : build_variant(out.resolved, out.embeddings, config.variant, tagger);
  return out;
}

int entity_bucket(const std::string& canonical, int buckets) {
  if (buckets < 1) throw std::invalid_argument("entity table needs at least one row");
  return static_cast<int>(fnv1a64(canonical, 0) % static_cast<std::uint64_t>(buckets));
}

nn::GraphSample to_sample(const ShuffledStory& story, const PreparedStory& prepared,
                          const nn::ModelConfig& config) {
  nn::GraphSample s;
  s.story_id = story.story_id;
  s.graph = prepared.graph;
  const int n = story.size();
  s.embeddings = nn::Matrix<double>(n, config.embed_dim);
  for (int i = 0; i < n; ++i) {
    const auto& v = prepared.embeddings[static_cast<std::size_t>(i)].vector;
    std::copy(v.begin(), v.end(), s.embeddings.row(i).begin());
  }
  for (const auto& e : prepared.graph.entities) {
    s.entity_buckets.push_back(entity_bucket(e.canonical, config.entity_buckets));
  }
  s.tie_rank = canonical_rank(story.presented);
  s.target = inverse_permutation(story.applied_permutation);
  return s;
}

nn::GraphSample prepare_sample(const ShuffledStory& story, const Embedder& embedder,
                               const nn::ModelConfig& config, const Tagger& tagger) {
  return to_sample(story, prepare_story(story, embedder, config, tagger), config);
}

std::vector<nn::GraphSample> prepare_samples(std::span<const ShuffledStory> stories,
                                             const Embedder& embedder, const nn::ModelConfig& config,
                                             const Tagger& tagger) {
  std::vector<nn::GraphSample> out;
  out.reserve(stories.size());
  for (const auto& s : stories) out.push_back(prepare_sample(s, embedder, config, tagger));
  return out;
}

}  // namespace pgorder
