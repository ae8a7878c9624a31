#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pgorder/graph.hpp"
#include "pgorder/nn/matrix.hpp"

namespace pgorder::nn {

/// Everything needed to rebuild the pipeline a set of parameters was trained for.
struct ModelConfig {
  int hidden = 64;             // h
  int embed_dim = 64;          // d
  int steps = 3;               // message-passing rounds T
  int entity_buckets = 4096;   // rows of the hashed entity-embedding table
  GraphVariant variant = GraphVariant::PG2;
  std::string embedder = "hash";  // "hash", "window" or "file:PATH"
  std::uint64_t embed_seed = 0;
  bool coref = true;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

template <typename T>
struct NamedMatrix {
  std::string name;
  Matrix<T> value;
};

/// Named parameter matrices in a fixed order. Gated cells store their three
/// gates fused along columns in (update, reset, candidate) order:
///   <cell>.Wx  in x 3h   input weights
///   <cell>.Uzr h x 2h    recurrent weights of the update and reset gates
///   <cell>.Uc  h x h     recurrent weights of the candidate
///   <cell>.b   1 x 3h    biases
template <typename T>
class ParamStore {
 public:
  /// Uniform +-sqrt(6 / (fan_in + fan_out)) weights (per gate for fused
  /// cells), zero biases except +1 on update gates.
  static ParamStore initialize(const ModelConfig& config, std::uint64_t seed);
  static ParamStore zeros_like(const ParamStore& other);

  void add(std::string name, Matrix<T> value);
  Matrix<T>& get(std::string_view name);
  const Matrix<T>& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::vector<NamedMatrix<T>>& entries() { return entries_; }
  const std::vector<NamedMatrix<T>>& entries() const { return entries_; }
  std::size_t total_size() const;
  bool all_finite() const;
  void fill(T value);

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& e : entries_) out.add(e.name, e.value.template cast<U>());
    return out;
  }

  friend bool operator==(const ParamStore& a, const ParamStore& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].name != b.entries_[i].name || !(a.entries_[i].value == b.entries_[i].value)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<NamedMatrix<T>> entries_;
};

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace pgorder::nn
