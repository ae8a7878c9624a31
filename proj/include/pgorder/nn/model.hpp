#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgorder/graph.hpp"
#include "pgorder/nn/matrix.hpp"
#include "pgorder/nn/params.hpp"
#include "pgorder/permutation.hpp"

namespace pgorder::nn {

/// Encoder input for one story in presented order.
struct GraphSample {
  std::string story_id;
  SEGraph graph;
  Matrix<double> embeddings;         // n x d
  std::vector<int> entity_buckets;   // one entity-table row per graph entity
  std::vector<int> tie_rank;         // canonical rank per sentence
  std::vector<int> target;           // presented index at each gold position; empty if unknown

  int size() const { return graph.n_sentences; }
};

template <typename T>
struct EncoderOutput {
  Matrix<T> sentence_states;  // n x h
  Matrix<T> story_state;      // 1 x h
};

struct DecodeMode {
  int beam_width = 0;  // 0 = greedy

  static DecodeMode greedy() { return {}; }
  static DecodeMode beam(int width);
  // "greedy" or "beam:W"
  static DecodeMode parse(std::string_view text);
  std::string str() const;
};

/// Gated graph recurrence. Sentence states start as tanh(x W + b) of the
/// embeddings and the story state as their mean; entity states start from
/// hashed table rows. Each of `steps` synchronous rounds updates
///   sentence i from [sum of neighbour sentence states,
///                    sum over roles of (sum of linked entity states) * P_role,
///                    story state],
///   entity e from the sum of its linked sentence states,
///   the story state from the mean sentence state.
/// Throws Error naming the round if a state becomes non-finite.
template <typename T>
EncoderOutput<T> grn_encode(const GraphSample& sample, const ParamStore<T>& params, int steps);

/// Pointer decoding. The decoder state starts as the story state; each step
/// feeds the previously chosen sentence state (a learned start vector first)
/// through a gated cell, scores remaining sentences with s_j W q, and takes
/// a softmax over the remaining ones. Greedy ties go to the lower entry of
/// `tie_rank` (index order when empty); beam ties to the lexicographically
/// smaller tie-rank sequence.
template <typename T>
Ordering pointer_decode(const EncoderOutput<T>& encoded, const ParamStore<T>& params, DecodeMode mode,
                        std::span<const int> tie_rank = {});

/// Per-step distributions (length n, zero outside the remaining candidates)
/// when the decoder is fed `sequence` (teacher forcing).
template <typename T>
std::vector<std::vector<double>> pointer_distributions(const EncoderOutput<T>& encoded,
                                                       const ParamStore<T>& params,
                                                       std::span<const int> sequence);

// Total log-probability of emitting `sequence` (a full sentence sequence).
template <typename T>
double sequence_log_probability(const EncoderOutput<T>& encoded, const ParamStore<T>& params,
                                std::span<const int> sequence);

/// Summed per-step negative log-likelihood of sample.target. When `grads`
/// is non-null the gradient is added to it.
template <typename T>
T sample_loss(const GraphSample& sample, const ParamStore<T>& params, int steps,
              ParamStore<T>* grads = nullptr);

}  // namespace pgorder::nn
