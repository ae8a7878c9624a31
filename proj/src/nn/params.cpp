#include "pgorder/nn/params.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pgorder/error.hpp"

namespace pgorder::nn {

namespace {

template <typename T>
Matrix<T> uniform(int rows, int cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix<T> m(rows, cols);
  for (auto& x : m.data) x = static_cast<T>(dist(rng));
  return m;
}

double xavier(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }

// Fused gated cell with input width `in` and state width `h`.
template <typename T>
void add_cell(ParamStore<T>& store, const std::string& prefix, int in, int h, std::mt19937_64& rng) {
  Matrix<T> wx(in, 3 * h);
  Matrix<T> uzr(h, 2 * h);
  for (int gate = 0; gate < 3; ++gate) {
    auto block = uniform<T>(in, h, xavier(in, h), rng);
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < h; ++j) wx(i, gate * h + j) = block(i, j);
    }
  }
  for (int gate = 0; gate < 2; ++gate) {
    auto block = uniform<T>(h, h, xavier(h, h), rng);
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < h; ++j) uzr(i, gate * h + j) = block(i, j);
    }
  }
  Matrix<T> b(1, 3 * h);
  for (int j = 0; j < h; ++j) b(0, j) = T(1);
  store.add(prefix + ".Wx", std::move(wx));
  store.add(prefix + ".Uzr", std::move(uzr));
  store.add(prefix + ".Uc", uniform<T>(h, h, xavier(h, h), rng));
  store.add(prefix + ".b", std::move(b));
}

}  // namespace

template <typename T>
ParamStore<T> ParamStore<T>::initialize(const ModelConfig& config, std::uint64_t seed) {
  const int h = config.hidden;
  const int d = config.embed_dim;
  if (h < 1 || d < 1 || config.entity_buckets < 1 || config.steps < 0) {
    throw std::invalid_argument("model dimensions must be positive");
  }
  std::mt19937_64 rng(seed);
  ParamStore<T> store;
  store.add("input.W", uniform<T>(d, h, xavier(d, h), rng));
  store.add("input.b", Matrix<T>(1, h));
  store.add("role.subject", uniform<T>(h, h, xavier(h, h), rng));
  store.add("role.object", uniform<T>(h, h, xavier(h, h), rng));
  store.add("role.other", uniform<T>(h, h, xavier(h, h), rng));
  add_cell(store, "sentence_cell", 3 * h, h, rng);
  add_cell(store, "entity_cell", h, h, rng);
  add_cell(store, "global_cell", h, h, rng);
  store.add("entity.table", uniform<T>(config.entity_buckets, h, xavier(config.entity_buckets, h), rng));
  store.add("decoder.start", uniform<T>(1, h, xavier(1, h), rng));
  add_cell(store, "decoder_cell", h, h, rng);
  store.add("pointer.W", uniform<T>(h, h, xavier(h, h), rng));
  return store;
}

template <typename T>
ParamStore<T> ParamStore<T>::zeros_like(const ParamStore& other) {
  ParamStore<T> out;
  for (const auto& e : other.entries_) out.add(e.name, Matrix<T>(e.value.rows, e.value.cols));
  return out;
}

template <typename T>
void ParamStore<T>::add(std::string name, Matrix<T> value) {
  if (contains(name)) throw Error("duplicate parameter '" + name + "'");
  entries_.push_back({std::move(name), std::move(value)});
}

template <typename T>
bool ParamStore<T>::contains(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

template <typename T>
Matrix<T>& ParamStore<T>::get(std::string_view name) {
  for (auto& e : entries_) {
    if (e.name == name) return e.value;
  }
  throw Error("no parameter named '" + std::string(name) + "'");
}

template <typename T>
const Matrix<T>& ParamStore<T>::get(std::string_view name) const {
  return const_cast<ParamStore*>(this)->get(name);
}

template <typename T>
std::size_t ParamStore<T>::total_size() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

template <typename T>
bool ParamStore<T>::all_finite() const {
  for (const auto& e : entries_) {
    if (!e.value.all_finite()) return false;
  }
  return true;
}

template <typename T>
void ParamStore<T>::fill(T value) {
  for (auto& e : entries_) std::fill(e.value.data.begin(), e.value.data.end(), value);
}

template class ParamStore<float>;
template class ParamStore<double>;

}  // namespace pgorder::nn
