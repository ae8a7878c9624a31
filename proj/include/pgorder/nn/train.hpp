#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pgorder/corpus.hpp"
#include "pgorder/embed.hpp"
#include "pgorder/metrics.hpp"
#include "pgorder/nn/checkpoint.hpp"
#include "pgorder/nn/model.hpp"
#include "pgorder/nn/params.hpp"
#include "pgorder/text.hpp"

namespace pgorder::nn {

struct TrainConfig {
  ModelConfig model;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int epochs = 30;
  double clip_norm = 5.0;  // global gradient norm; <= 0 disables clipping
  DecodeMode validation_decode = DecodeMode::greedy();
  // Stop after the first epoch whose validation PMR reaches this value.
  std::optional<double> target_val_pmr;
};

class Adam {
 public:
  explicit Adam(const ParamStore<float>& like, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step(ParamStore<float>& params, const ParamStore<float>& grads);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long t_ = 0;
  ParamStore<float> m_;
  ParamStore<float> v_;
};

// Scales all gradients so that their global L2 norm is at most max_norm; returns the norm before.
double clip_gradients(ParamStore<float>& grads, double max_norm);

/// Greedy or beam decoding of every sample, scored against sample.target.
/// Single-sentence stories count as exact with tau 1.
EvalReport evaluate_samples(std::span<const GraphSample> samples, const ParamStore<float>& params, int steps,
                            DecodeMode decode);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training of the summed per-step negative log-likelihood.
/// Batches are drawn in a seeded shuffled order each epoch and their
/// gradients reduced in sample order, so results depend only on the seed.
/// Returns the parameters of the epoch with the best validation
/// (PMR, tau); every epoch's record is in history. Throws Error naming the
/// epoch and batch if the loss or the parameters become non-finite.
Checkpoint train(std::span<const GraphSample> train_samples, std::span<const GraphSample> val_samples,
                 const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Shuffles each story (seeded by config.model.seed and position), prepares
/// samples with `embedder` and trains on split.train, validating on
/// split.validation.
Checkpoint train_on_split(const CorpusSplit& split, const TrainConfig& config, const Embedder& embedder,
                          const EpochCallback& on_epoch = {}, const Tagger& tagger = default_tagger());

}  // namespace pgorder::nn
