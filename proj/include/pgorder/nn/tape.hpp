#pragma once

#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "pgorder/nn/matrix.hpp"

namespace pgorder::nn {

/// Reverse-mode differentiation over matrix-valued nodes. Every op appends
/// a node; backward() walks them in reverse creation order. With gradient
/// tracking off the tape only evaluates.
template <typename T>
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  explicit Tape(bool track_gradients = true) : track_(track_gradients) {}

  Var constant(Matrix<T> value);
  // Gradient flowing into the node is added to *grad_sink on backward().
  Var parameter(const Matrix<T>& value, Matrix<T>* grad_sink);
  // Rows of `table` selected by index; gradients scatter back into *grad_sink.
  Var gather_rows(const Matrix<T>& table, Matrix<T>* grad_sink, std::vector<int> rows);

  Var matmul(Var a, Var b);     // a * b
  Var matmul_nt(Var a, Var b);  // a * b^T
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  // adds a 1 x c row to every row of a
  Var mul(Var a, Var b);        // elementwise
  Var one_minus(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var concat_cols(std::initializer_list<Var> parts);
  Var slice_cols(Var a, int begin, int count);
  Var mean_rows(Var a);
  Var broadcast_rows(Var a, int rows);
  Var row(Var a, int r);
  /// -log softmax(scores)[target], the softmax taken over entries with
  /// mask != 0. `scores` is read as a flat vector.
  Var masked_nll(Var scores, std::vector<char> mask, int target);
  Var sum(std::span<const Var> scalars);

  const Matrix<T>& value(Var v) const { return nodes_[v.id].value; }
  std::size_t size() const { return nodes_.size(); }
  bool tracking() const { return track_; }

  // Seeds d(root)/d(root) = 1 for a 1 x 1 root and propagates.
  void backward(Var root);

 private:
  struct Node {
    Matrix<T> value;
    Matrix<T> grad;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  Var push(Matrix<T> value, bool needs_grad, std::function<void()> backward);
  bool needs(Var v) const { return track_ && nodes_[v.id].needs_grad; }
  Matrix<T>& grad(int id);

  bool track_;
  std::vector<Node> nodes_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace pgorder::nn
