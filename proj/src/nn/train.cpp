#include "pgorder/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/hash.hpp"
#include "pgorder/pipeline.hpp"

namespace pgorder::nn {

Adam::Adam(const ParamStore<float>& like, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon),
      m_(ParamStore<float>::zeros_like(like)),
      v_(ParamStore<float>::zeros_like(like)) {}

void Adam::step(ParamStore<float>& params, const ParamStore<float>& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto& ps = params.entries();
  const auto& gs = grads.entries();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    auto& p = ps[k].value.data;
    const auto& g = gs[k].value.data;
    auto& m = m_.entries()[k].value.data;
    auto& v = v_.entries()[k].value.data;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      m[i] = static_cast<float>(beta1_ * m[i] + (1.0 - beta1_) * gi);
      v[i] = static_cast<float>(beta2_ * v[i] + (1.0 - beta2_) * gi * gi);
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] = static_cast<float>(p[i] - lr_ * mhat / (std::sqrt(vhat) + epsilon_));
    }
  }
}

double clip_gradients(ParamStore<float>& grads, double max_norm) {
  double sq = 0.0;
  for (const auto& e : grads.entries()) {
    for (float g : e.value.data) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const float scale = static_cast<float>(max_norm / norm);
    for (auto& e : grads.entries()) {
      for (float& g : e.value.data) g *= scale;
    }
  }
  return norm;
}

EvalReport evaluate_samples(std::span<const GraphSample> samples, const ParamStore<float>& params, int steps,
                            DecodeMode decode) {
  std::vector<StoryResult> results;
  results.reserve(samples.size());
  for (const auto& s : samples) {
    if (static_cast<int>(s.target.size()) != s.size()) {
      throw std::invalid_argument("story '" + s.story_id + "' has no gold target");
    }
    const Ordering gold = Ordering::from_sequence(s.target);
    if (s.size() < 2) {
      results.push_back({s.story_id, 1.0, true});
      continue;
    }
    const auto enc = grn_encode(s, params, steps);
    const Ordering pred = pointer_decode(enc, params, decode, s.tie_rank);
    results.push_back({s.story_id, kendall_tau(pred, gold), pred == gold});
  }
  return summarize(std::move(results));
}

Checkpoint train(std::span<const GraphSample> train_samples, std::span<const GraphSample> val_samples,
                 const TrainConfig& config, const EpochCallback& on_epoch) {
  if (train_samples.empty()) throw std::invalid_argument("no training stories");
  if (val_samples.empty()) throw std::invalid_argument("no validation stories");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");

  auto params = ParamStore<float>::initialize(config.model, config.model.seed);
  auto grads = ParamStore<float>::zeros_like(params);
  Adam adam(params, config.learning_rate);

  Checkpoint best{config.model, params, 0, {}};
  bool have_best = false;
  double best_pmr = -1.0;
  double best_tau = -2.0;
  std::vector<EpochRecord> history;

  std::vector<std::size_t> order(train_samples.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(config.model.seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      ++batch_index;
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      grads.fill(0.0f);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        batch_loss += sample_loss(train_samples[order[k]], params, config.model.steps, &grads);
      }
      const float scale = 1.0f / static_cast<float>(stop - start);
      for (auto& e : grads.entries()) {
        for (float& g : e.value.data) g *= scale;
      }
      const double norm = clip_gradients(grads, config.clip_norm);
      adam.step(params, grads);
      if (!std::isfinite(batch_loss) || !std::isfinite(norm) || !params.all_finite()) {
        throw Error("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(batch_index));
      }
      epoch_loss += batch_loss;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train_samples.size());
    const auto report = evaluate_samples(val_samples, params, config.model.steps, config.validation_decode);
    record.val_tau = report.mean_tau;
    record.val_pmr = report.pmr;
    history.push_back(record);
    if (on_epoch) on_epoch(record);

    const bool better = record.val_pmr > best_pmr ||
                        (record.val_pmr == best_pmr && record.val_tau > best_tau);
    if (!have_best || better) {
      have_best = true;
      best_pmr = record.val_pmr;
      best_tau = record.val_tau;
      best.params = params;
      best.epoch = epoch;
    }
    if (config.target_val_pmr && record.val_pmr >= *config.target_val_pmr) break;
  }
  best.history = std::move(history);
  return best;
}

Checkpoint train_on_split(const CorpusSplit& split, const TrainConfig& config, const Embedder& embedder,
                          const EpochCallback& on_epoch, const Tagger& tagger) {
  auto prepare = [&](const std::vector<Story>& stories, std::uint64_t stream) {
    std::vector<GraphSample> out;
    out.reserve(stories.size());
    for (std::size_t i = 0; i < stories.size(); ++i) {
      const auto shuffled = shuffle_story(stories[i], mix_seed(mix_seed(config.model.seed, stream), i));
      out.push_back(prepare_sample(shuffled, embedder, config.model, tagger));
    }
    return out;
  };
  const auto train_samples = prepare(split.train, 1);
  const auto val_samples = prepare(split.validation, 2);
  return train(train_samples, val_samples, config, on_epoch);
}

}  // namespace pgorder::nn
