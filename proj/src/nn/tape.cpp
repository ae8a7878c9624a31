#include "pgorder/nn/tape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pgorder::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// c += a * b
template <typename T>
void gemm_nn(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
  for (int i = 0; i < a.rows; ++i) {
    T* crow = &c(i, 0);
    for (int p = 0; p < a.cols; ++p) {
      const T av = a(i, p);
      if (av == T(0)) continue;
      const T* brow = &b(p, 0);
      for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
    }
  }
}

// c += a * b^T
template <typename T>
void gemm_nt(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
  for (int i = 0; i < a.rows; ++i) {
    const T* arow = &a(i, 0);
    for (int j = 0; j < b.rows; ++j) {
      const T* brow = &b(j, 0);
      T s = 0;
      for (int p = 0; p < a.cols; ++p) s += arow[p] * brow[p];
      c(i, j) += s;
    }
  }
}

// c += a^T * b
template <typename T>
void gemm_tn(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& c) {
  for (int p = 0; p < a.rows; ++p) {
    const T* brow = &b(p, 0);
    for (int i = 0; i < a.cols; ++i) {
      const T av = a(p, i);
      if (av == T(0)) continue;
      T* crow = &c(i, 0);
      for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace

template <typename T>
typename Tape<T>::Var Tape<T>::push(Matrix<T> value, bool needs_grad, std::function<void()> backward) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = track_ && needs_grad;
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

template <typename T>
Matrix<T>& Tape<T>::grad(int id) {
  Node& n = nodes_[id];
  if (!n.grad.same_shape(n.value) || n.grad.data.empty()) n.grad = Matrix<T>(n.value.rows, n.value.cols);
  return n.grad;
}

template <typename T>
typename Tape<T>::Var Tape<T>::constant(Matrix<T> value) {
  return push(std::move(value), false, {});
}

template <typename T>
typename Tape<T>::Var Tape<T>::parameter(const Matrix<T>& value, Matrix<T>* grad_sink) {
  const int id = static_cast<int>(nodes_.size());
  return push(value, grad_sink != nullptr, [this, id, grad_sink] {
    const Matrix<T>& g = nodes_[id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) grad_sink->data[i] += g.data[i];
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::gather_rows(const Matrix<T>& table, Matrix<T>* grad_sink,
                                           std::vector<int> rows) {
  Matrix<T> out(static_cast<int>(rows.size()), table.cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] >= 0 && rows[r] < table.rows, "gather_rows: index out of range");
    std::copy(table.row(rows[r]).begin(), table.row(rows[r]).end(), out.row(static_cast<int>(r)).begin());
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), grad_sink != nullptr, [this, id, grad_sink, rows = std::move(rows)] {
    const Matrix<T>& g = nodes_[id].grad;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto src = g.row(static_cast<int>(r));
      auto dst = grad_sink->row(rows[r]);
      for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::matmul(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  require(av.cols == bv.rows, "matmul: inner dimensions differ");
  Matrix<T> out(av.rows, bv.cols);
  gemm_nn(av, bv, out);
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [this, id, a, b] {
    const Matrix<T>& g = nodes_[id].grad;
    if (nodes_[a.id].needs_grad) gemm_nt(g, nodes_[b.id].value, grad(a.id));
    if (nodes_[b.id].needs_grad) gemm_tn(nodes_[a.id].value, g, grad(b.id));
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::matmul_nt(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  require(av.cols == bv.cols, "matmul_nt: inner dimensions differ");
  Matrix<T> out(av.rows, bv.rows);
  gemm_nt(av, bv, out);
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [this, id, a, b] {
    const Matrix<T>& g = nodes_[id].grad;
    if (nodes_[a.id].needs_grad) gemm_nn(g, nodes_[b.id].value, grad(a.id));
    if (nodes_[b.id].needs_grad) gemm_tn(g, nodes_[a.id].value, grad(b.id));
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::add(Var a, Var b) {
  const auto& av = value(a);
  require(av.same_shape(value(b)), "add: shape mismatch");
  Matrix<T> out = av;
  const auto& bv = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += bv.data[i];
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [this, id, a, b] {
    const Matrix<T>& g = nodes_[id].grad;
    for (Var v : {a, b}) {
      if (!nodes_[v.id].needs_grad) continue;
      auto& gv = grad(v.id);
      for (std::size_t i = 0; i < g.size(); ++i) gv.data[i] += g.data[i];
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::add_row(Var a, Var r) {
  const auto& av = value(a);
  const auto& rv = value(r);
  require(rv.rows == 1 && rv.cols == av.cols, "add_row: shape mismatch");
  Matrix<T> out = av;
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) out(i, j) += rv(0, j);
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(r), [this, id, a, r] {
    const Matrix<T>& g = nodes_[id].grad;
    if (nodes_[a.id].needs_grad) {
      auto& ga = grad(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i];
    }
    if (nodes_[r.id].needs_grad) {
      auto& gr = grad(r.id);
      for (int i = 0; i < g.rows; ++i) {
        for (int j = 0; j < g.cols; ++j) gr(0, j) += g(i, j);
      }
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::mul(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  require(av.same_shape(bv), "mul: shape mismatch");
  Matrix<T> out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] *= bv.data[i];
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a) || needs(b), [this, id, a, b] {
    const Matrix<T>& g = nodes_[id].grad;
    if (nodes_[a.id].needs_grad) {
      auto& ga = grad(a.id);
      const auto& bv2 = nodes_[b.id].value;
      for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * bv2.data[i];
    }
    if (nodes_[b.id].needs_grad) {
      auto& gb = grad(b.id);
      const auto& av2 = nodes_[a.id].value;
      for (std::size_t i = 0; i < g.size(); ++i) gb.data[i] += g.data[i] * av2.data[i];
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::one_minus(Var a) {
  Matrix<T> out = value(a);
  for (auto& x : out.data) x = T(1) - x;
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a] {
    const Matrix<T>& g = nodes_[id].grad;
    auto& ga = grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] -= g.data[i];
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::sigmoid(Var a) {
  Matrix<T> out = value(a);
  for (auto& x : out.data) x = T(1) / (T(1) + std::exp(-x));
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a] {
    const Matrix<T>& g = nodes_[id].grad;
    const Matrix<T>& y = nodes_[id].value;
    auto& ga = grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * y.data[i] * (T(1) - y.data[i]);
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::tanh(Var a) {
  Matrix<T> out = value(a);
  for (auto& x : out.data) x = std::tanh(x);
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a] {
    const Matrix<T>& g = nodes_[id].grad;
    const Matrix<T>& y = nodes_[id].value;
    auto& ga = grad(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga.data[i] += g.data[i] * (T(1) - y.data[i] * y.data[i]);
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::concat_cols(std::initializer_list<Var> parts) {
  std::vector<Var> vars(parts);
  require(!vars.empty(), "concat_cols: no inputs");
  const int rows = value(vars.front()).rows;
  int cols = 0;
  bool any = false;
  for (Var v : vars) {
    require(value(v).rows == rows, "concat_cols: row mismatch");
    cols += value(v).cols;
    any = any || needs(v);
  }
  Matrix<T> out(rows, cols);
  int offset = 0;
  for (Var v : vars) {
    const auto& m = value(v);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < m.cols; ++j) out(i, offset + j) = m(i, j);
    }
    offset += m.cols;
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), any, [this, id, vars = std::move(vars)] {
    const Matrix<T>& g = nodes_[id].grad;
    int off = 0;
    for (Var v : vars) {
      const int c = nodes_[v.id].value.cols;
      if (nodes_[v.id].needs_grad) {
        auto& gv = grad(v.id);
        for (int i = 0; i < g.rows; ++i) {
          for (int j = 0; j < c; ++j) gv(i, j) += g(i, off + j);
        }
      }
      off += c;
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::slice_cols(Var a, int begin, int count) {
  const auto& av = value(a);
  require(begin >= 0 && count >= 0 && begin + count <= av.cols, "slice_cols: out of range");
  Matrix<T> out(av.rows, count);
  for (int i = 0; i < av.rows; ++i) {
    for (int j = 0; j < count; ++j) out(i, j) = av(i, begin + j);
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a, begin, count] {
    const Matrix<T>& g = nodes_[id].grad;
    auto& ga = grad(a.id);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < count; ++j) ga(i, begin + j) += g(i, j);
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::mean_rows(Var a) {
  const auto& av = value(a);
  require(av.rows > 0, "mean_rows: empty matrix");
  Matrix<T> out(1, av.cols);
  for (int i = 0; i < av.rows; ++i) {
    for (int j = 0; j < av.cols; ++j) out(0, j) += av(i, j);
  }
  const T inv = T(1) / static_cast<T>(av.rows);
  for (auto& x : out.data) x *= inv;
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a, inv] {
    const Matrix<T>& g = nodes_[id].grad;
    auto& ga = grad(a.id);
    for (int i = 0; i < ga.rows; ++i) {
      for (int j = 0; j < ga.cols; ++j) ga(i, j) += g(0, j) * inv;
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::broadcast_rows(Var a, int rows) {
  const auto& av = value(a);
  require(av.rows == 1, "broadcast_rows: input must be a row vector");
  Matrix<T> out(rows, av.cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < av.cols; ++j) out(i, j) = av(0, j);
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a] {
    const Matrix<T>& g = nodes_[id].grad;
    auto& ga = grad(a.id);
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) ga(0, j) += g(i, j);
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::row(Var a, int r) {
  const auto& av = value(a);
  require(r >= 0 && r < av.rows, "row: index out of range");
  Matrix<T> out(1, av.cols);
  for (int j = 0; j < av.cols; ++j) out(0, j) = av(r, j);
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(a), [this, id, a, r] {
    const Matrix<T>& g = nodes_[id].grad;
    auto& ga = grad(a.id);
    for (int j = 0; j < g.cols; ++j) ga(r, j) += g(0, j);
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::masked_nll(Var scores, std::vector<char> mask, int target) {
  const auto& sv = value(scores);
  require(mask.size() == sv.size(), "masked_nll: mask length mismatch");
  require(target >= 0 && static_cast<std::size_t>(target) < sv.size() && mask[target],
          "masked_nll: target outside the mask");
  T max_score = -std::numeric_limits<T>::infinity();
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (mask[i]) max_score = std::max(max_score, sv.data[i]);
  }
  T z = 0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    if (mask[i]) z += std::exp(sv.data[i] - max_score);
  }
  const T log_z = max_score + std::log(z);
  Matrix<T> out(1, 1, log_z - sv.data[target]);
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), needs(scores), [this, id, scores, mask = std::move(mask), target, log_z] {
    const T g = nodes_[id].grad(0, 0);
    const auto& s = nodes_[scores.id].value;
    auto& gs = grad(scores.id);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!mask[i]) continue;
      const T p = std::exp(s.data[i] - log_z);
      gs.data[i] += g * (p - (static_cast<int>(i) == target ? T(1) : T(0)));
    }
  });
}

template <typename T>
typename Tape<T>::Var Tape<T>::sum(std::span<const Var> scalars) {
  Matrix<T> out(1, 1);
  bool any = false;
  std::vector<Var> vars(scalars.begin(), scalars.end());
  for (Var v : vars) {
    require(value(v).size() == 1, "sum: inputs must be scalars");
    out(0, 0) += value(v).data[0];
    any = any || needs(v);
  }
  const int id = static_cast<int>(nodes_.size());
  return push(std::move(out), any, [this, id, vars = std::move(vars)] {
    const T g = nodes_[id].grad(0, 0);
    for (Var v : vars) {
      if (nodes_[v.id].needs_grad) grad(v.id)(0, 0) += g;
    }
  });
}

template <typename T>
void Tape<T>::backward(Var root) {
  require(track_, "backward: tape does not track gradients");
  require(value(root).size() == 1, "backward: root must be a scalar");
  if (!nodes_[root.id].needs_grad) return;
  grad(root.id)(0, 0) = T(1);
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.needs_grad && !n.grad.data.empty() && n.backward) n.backward();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace pgorder::nn
