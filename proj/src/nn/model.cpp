#include "pgorder/nn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "pgorder/error.hpp"
#include "pgorder/nn/tape.hpp"

namespace pgorder::nn {

DecodeMode DecodeMode::beam(int width) {
  if (width < 1) throw std::invalid_argument("beam width must be at least 1");
  return DecodeMode{width};
}

DecodeMode DecodeMode::parse(std::string_view text) {
  if (text == "greedy") return greedy();
  if (text.rfind("beam:", 0) == 0) {
    const std::string width(text.substr(5));
    std::size_t used = 0;
    int w = 0;
    try {
      w = std::stoi(width, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == width.size() && used > 0) return beam(w);
  }
  throw std::invalid_argument("decode mode must be 'greedy' or 'beam:W', got '" + std::string(text) +
                              "'");
}

std::string DecodeMode::str() const {
  return beam_width == 0 ? "greedy" : "beam:" + std::to_string(beam_width);
}

namespace {

/// Binds a parameter store to a tape and builds the encoder/decoder graph.
template <typename T>
class Network {
 public:
  using Var = typename Tape<T>::Var;

  struct Cell {
    Var wx, uzr, uc, b;
  };

  Network(Tape<T>& tape, const ParamStore<T>& params, ParamStore<T>* grads)
      : tape_(tape), params_(params), grads_(grads), hidden_(params.get("input.W").cols) {}

  Var param(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    Var v = tape_.parameter(params_.get(name), grads_ ? &grads_->get(name) : nullptr);
    cache_.emplace(name, v);
    return v;
  }

  Cell cell(const std::string& prefix) {
    return Cell{param(prefix + ".Wx"), param(prefix + ".Uzr"), param(prefix + ".Uc"),
                param(prefix + ".b")};
  }

  // h' = z * h + (1 - z) * tanh(x Wc + (r * h) Uc + bc)
  Var gru(const Cell& c, Var x, Var h) {
    const int k = hidden_;
    Var gx = tape_.add_row(tape_.matmul(x, c.wx), c.b);
    Var gh = tape_.matmul(h, c.uzr);
    Var z = tape_.sigmoid(tape_.add(tape_.slice_cols(gx, 0, k), tape_.slice_cols(gh, 0, k)));
    Var r = tape_.sigmoid(tape_.add(tape_.slice_cols(gx, k, k), tape_.slice_cols(gh, k, k)));
    Var cand = tape_.tanh(tape_.add(tape_.slice_cols(gx, 2 * k, k), tape_.matmul(tape_.mul(r, h), c.uc)));
    return tape_.add(tape_.mul(z, h), tape_.mul(tape_.one_minus(z), cand));
  }

  struct Encoded {
    Var sentences;
    Var story;
  };

  Encoded encode(const GraphSample& sample, int steps) {
    const int n = sample.size();
    const int m = static_cast<int>(sample.graph.entities.size());
    const int h = hidden_;
    if (n < 1) throw std::invalid_argument("cannot encode an empty story");
    if (sample.embeddings.rows != n) throw Error("story '" + sample.story_id + "': embedding count differs from sentence count");
    if (sample.embeddings.cols != params_.get("input.W").rows) {
      throw Error("story '" + sample.story_id + "': embedding dimension " +
                  std::to_string(sample.embeddings.cols) + " does not match the model's " +
                  std::to_string(params_.get("input.W").rows));
    }
    if (static_cast<int>(sample.entity_buckets.size()) != m) {
      throw std::invalid_argument("one entity bucket per graph entity is required");
    }

    Var x = tape_.constant(sample.embeddings.template cast<T>());
    Var s = tape_.tanh(tape_.add_row(tape_.matmul(x, param("input.W")), param("input.b")));
    Var g = tape_.mean_rows(s);

    Matrix<T> adj(n, n);
    for (auto [a, b] : sample.graph.ss_edges) adj(a, b) = adj(b, a) = T(1);
    Var ss_adj = tape_.constant(std::move(adj));

    static const char* const kRoleParams[kRoleCount] = {"role.subject", "role.object", "role.other"};
    std::vector<std::pair<Var, Var>> role_links;  // (n x m adjacency, projection)
    Var link_t{};
    Var e{};
    if (m > 0) {
      std::vector<Matrix<T>> by_role(kRoleCount, Matrix<T>(n, m));
      Matrix<T> incidence_t(m, n);
      for (const auto& edge : sample.graph.se_edges) {
        by_role[static_cast<int>(edge.role)](edge.sentence, edge.entity) = T(1);
        incidence_t(edge.entity, edge.sentence) = T(1);
      }
      for (int r = 0; r < kRoleCount; ++r) {
        const bool used = std::any_of(by_role[r].data.begin(), by_role[r].data.end(),
                                      [](T v) { return v != T(0); });
        if (used) role_links.emplace_back(tape_.constant(std::move(by_role[r])), param(kRoleParams[r]));
      }
      link_t = tape_.constant(std::move(incidence_t));
      e = tape_.gather_rows(params_.get("entity.table"),
                            grads_ ? &grads_->get("entity.table") : nullptr, sample.entity_buckets);
    }

    const Cell sentence_cell = cell("sentence_cell");
    const Cell entity_cell = cell("entity_cell");
    const Cell global_cell = cell("global_cell");
    for (int round = 1; round <= steps; ++round) {
      Var neighbours = tape_.matmul(ss_adj, s);
      Var entity_msg = tape_.constant(Matrix<T>(n, h));
      for (auto [links, projection] : role_links) {
        entity_msg = tape_.add(entity_msg, tape_.matmul(tape_.matmul(links, e), projection));
      }
      Var input = tape_.concat_cols({neighbours, entity_msg, tape_.broadcast_rows(g, n)});
      Var s_next = gru(sentence_cell, input, s);
      if (m > 0) e = gru(entity_cell, tape_.matmul(link_t, s), e);
      g = gru(global_cell, tape_.mean_rows(s), g);
      s = s_next;
      if (!tape_.value(s).all_finite() || !tape_.value(g).all_finite() ||
          (m > 0 && !tape_.value(e).all_finite())) {
        throw Error("story '" + sample.story_id + "': non-finite state in message-passing round " +
                    std::to_string(round));
      }
    }
    return {s, g};
  }

  Var start() { return param("decoder.start"); }
  Var step(Var state, Var input) { return gru(cell("decoder_cell"), input, state); }
  // n x 1 pointer logits
  Var scores(Var sentences, Var state) {
    return tape_.matmul_nt(sentences, tape_.matmul(state, param("pointer.W")));
  }

 private:
  Tape<T>& tape_;
  const ParamStore<T>& params_;
  ParamStore<T>* grads_;
  int hidden_;
  std::map<std::string, Var> cache_;
};

// log-softmax over entries with !used
template <typename T>
std::vector<double> masked_log_softmax(const Matrix<T>& scores, const std::vector<char>& used) {
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) max_score = std::max(max_score, static_cast<double>(scores.data[i]));
  }
  double z = 0.0;
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) z += std::exp(static_cast<double>(scores.data[i]) - max_score);
  }
  const double log_z = max_score + std::log(z);
  std::vector<double> out(used.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) out[i] = static_cast<double>(scores.data[i]) - log_z;
  }
  return out;
}

std::vector<int> effective_tie_rank(std::span<const int> tie_rank, int n) {
  if (tie_rank.empty()) return identity_permutation(n);
  if (static_cast<int>(tie_rank.size()) != n) throw std::invalid_argument("tie rank length mismatch");
  return {tie_rank.begin(), tie_rank.end()};
}

}  // namespace

template <typename T>
EncoderOutput<T> grn_encode(const GraphSample& sample, const ParamStore<T>& params, int steps) {
  Tape<T> tape(false);
  Network<T> net(tape, params, nullptr);
  auto enc = net.encode(sample, steps);
  return {tape.value(enc.sentences), tape.value(enc.story)};
}

template <typename T>
Ordering pointer_decode(const EncoderOutput<T>& encoded, const ParamStore<T>& params, DecodeMode mode,
                        std::span<const int> tie_rank) {
  const int n = encoded.sentence_states.rows;
  if (n == 0) return Ordering{};
  const auto ties = effective_tie_rank(tie_rank, n);

  using Var = typename Tape<T>::Var;
  Tape<T> tape(false);
  Network<T> net(tape, params, nullptr);
  const Var sentences = tape.constant(encoded.sentence_states);

  struct Hypothesis {
    std::vector<int> sequence;
    std::vector<int> tie_sequence;
    std::vector<char> used;
    std::vector<double> steps;
    double log_prob = 0.0;
    Var state;
    Var input;
  };

  const int width = mode.beam_width == 0 ? 1 : mode.beam_width;
  std::vector<Hypothesis> beam(1);
  beam[0].used.assign(static_cast<std::size_t>(n), 0);
  beam[0].state = tape.constant(encoded.story_state);
  beam[0].input = net.start();

  for (int t = 0; t < n; ++t) {
    std::vector<Hypothesis> next;
    for (auto& hyp : beam) {
      const Var state = net.step(hyp.state, hyp.input);
      const Var scores = net.scores(sentences, state);
      const auto log_p = masked_log_softmax(tape.value(scores), hyp.used);
      if (mode.beam_width == 0) {
        // Greedy: highest logit, ties to the lower tie rank.
        int best = -1;
        for (int j = 0; j < n; ++j) {
          if (hyp.used[j]) continue;
          if (best < 0 || log_p[j] > log_p[best] || (log_p[j] == log_p[best] && ties[j] < ties[best])) {
            best = j;
          }
        }
        Hypothesis h = hyp;
        h.sequence.push_back(best);
        h.tie_sequence.push_back(ties[best]);
        h.used[best] = 1;
        h.steps.push_back(log_p[best]);
        h.log_prob += log_p[best];
        h.state = state;
        h.input = tape.row(sentences, best);
        next.push_back(std::move(h));
        continue;
      }
      for (int j = 0; j < n; ++j) {
        if (hyp.used[j]) continue;
        Hypothesis h = hyp;
        h.sequence.push_back(j);
        h.tie_sequence.push_back(ties[j]);
        h.used[j] = 1;
        h.steps.push_back(log_p[j]);
        h.log_prob += log_p[j];
        h.state = state;
        h.input = Var{-1};
        next.push_back(std::move(h));
      }
    }
    std::stable_sort(next.begin(), next.end(), [](const Hypothesis& a, const Hypothesis& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      return a.tie_sequence < b.tie_sequence;
    });
    if (static_cast<int>(next.size()) > width) next.resize(static_cast<std::size_t>(width));
    for (auto& h : next) {
      if (h.input.id < 0) h.input = tape.row(sentences, h.sequence.back());
    }
    beam = std::move(next);
  }

  Ordering out = Ordering::from_sequence(beam.front().sequence);
  out.step_scores = beam.front().steps;
  return out;
}

template <typename T>
std::vector<std::vector<double>> pointer_distributions(const EncoderOutput<T>& encoded,
                                                       const ParamStore<T>& params,
                                                       std::span<const int> sequence) {
  const int n = encoded.sentence_states.rows;
  require_permutation(sequence, "teacher-forced sequence");
  if (static_cast<int>(sequence.size()) != n) throw std::invalid_argument("sequence length mismatch");
  Tape<T> tape(false);
  Network<T> net(tape, params, nullptr);
  const auto sentences = tape.constant(encoded.sentence_states);
  auto state = tape.constant(encoded.story_state);
  auto input = net.start();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<double>> out;
  for (int t = 0; t < n; ++t) {
    state = net.step(state, input);
    const auto log_p = masked_log_softmax(tape.value(net.scores(sentences, state)), used);
    std::vector<double> p(log_p.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = used[j] ? 0.0 : std::exp(log_p[j]);
    out.push_back(std::move(p));
    used[sequence[t]] = 1;
    input = tape.row(sentences, sequence[t]);
  }
  return out;
}

template <typename T>
double sequence_log_probability(const EncoderOutput<T>& encoded, const ParamStore<T>& params,
                                std::span<const int> sequence) {
  const auto dists = pointer_distributions(encoded, params, sequence);
  double total = 0.0;
  for (std::size_t t = 0; t < dists.size(); ++t) total += std::log(dists[t][sequence[t]]);
  return total;
}

template <typename T>
T sample_loss(const GraphSample& sample, const ParamStore<T>& params, int steps, ParamStore<T>* grads) {
  const int n = sample.size();
  if (static_cast<int>(sample.target.size()) != n) {
    throw std::invalid_argument("story '" + sample.story_id + "' has no gold target");
  }
  Tape<T> tape(grads != nullptr);
  Network<T> net(tape, params, grads);
  const auto enc = net.encode(sample, steps);

  auto state = enc.story;
  auto input = net.start();
  std::vector<char> mask(static_cast<std::size_t>(n), 1);
  std::vector<typename Tape<T>::Var> terms;
  for (int t = 0; t < n; ++t) {
    state = net.step(state, input);
    const int target = sample.target[t];
    terms.push_back(tape.masked_nll(net.scores(enc.sentences, state), mask, target));
    mask[target] = 0;
    input = tape.row(enc.sentences, target);
  }
  const auto loss = tape.sum(terms);
  if (grads != nullptr) tape.backward(loss);
  return tape.value(loss)(0, 0);
}

template EncoderOutput<float> grn_encode(const GraphSample&, const ParamStore<float>&, int);
template EncoderOutput<double> grn_encode(const GraphSample&, const ParamStore<double>&, int);
template Ordering pointer_decode(const EncoderOutput<float>&, const ParamStore<float>&, DecodeMode,
                                 std::span<const int>);
template Ordering pointer_decode(const EncoderOutput<double>&, const ParamStore<double>&, DecodeMode,
                                 std::span<const int>);
template std::vector<std::vector<double>> pointer_distributions(const EncoderOutput<float>&,
                                                                const ParamStore<float>&,
                                                                std::span<const int>);
template std::vector<std::vector<double>> pointer_distributions(const EncoderOutput<double>&,
                                                                const ParamStore<double>&,
                                                                std::span<const int>);
template double sequence_log_probability(const EncoderOutput<float>&, const ParamStore<float>&,
                                         std::span<const int>);
template double sequence_log_probability(const EncoderOutput<double>&, const ParamStore<double>&,
                                         std::span<const int>);
template float sample_loss(const GraphSample&, const ParamStore<float>&, int, ParamStore<float>*);
template double sample_loss(const GraphSample&, const ParamStore<double>&, int, ParamStore<double>*);

}  // namespace pgorder::nn
