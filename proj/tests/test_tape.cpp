#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "pgorder/nn/tape.hpp"

using namespace pgorder::nn;

namespace {

using Var = Tape<double>::Var;
using Op = std::function<Var(Tape<double>&, const std::vector<Var>&)>;

Matrix<double> random_matrix(int r, int c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix<double> m(r, c);
  for (auto& x : m.data) x = dist(rng);
  return m;
}

// Scalar read-out <weights, op(inputs)> so every output entry matters.
double evaluate(const Op& op, const std::vector<Matrix<double>>& inputs, const Matrix<double>* weights,
                std::vector<Matrix<double>>* grads, Matrix<double>* out_weights = nullptr) {
  Tape<double> tape(grads != nullptr);
  std::vector<Var> vars;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    vars.push_back(tape.parameter(inputs[i], grads ? &(*grads)[i] : nullptr));
  }
  Var y = op(tape, vars);
  const auto& value = tape.value(y);
  Matrix<double> w = weights ? *weights : Matrix<double>(value.rows, value.cols, 0.0);
  if (!weights) {
    std::mt19937_64 rng(99);
    w = random_matrix(value.rows, value.cols, rng);
  }
  if (out_weights) *out_weights = w;
  Var weighted = tape.mul(y, tape.constant(w));
  Var left = tape.constant(Matrix<double>(1, value.rows, 1.0));
  Var right = tape.constant(Matrix<double>(value.cols, 1, 1.0));
  Var scalar = tape.matmul(tape.matmul(left, weighted), right);
  if (grads) tape.backward(scalar);
  return tape.value(scalar)(0, 0);
}

double max_gradient_error(const Op& op, std::vector<Matrix<double>> inputs) {
  std::vector<Matrix<double>> grads;
  for (const auto& m : inputs) grads.emplace_back(m.rows, m.cols);
  Matrix<double> w;
  evaluate(op, inputs, nullptr, &grads, &w);
  double worst = 0.0;
  const double eps = 1e-6;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].data.size(); ++i) {
      const double saved = inputs[k].data[i];
      inputs[k].data[i] = saved + eps;
      const double up = evaluate(op, inputs, &w, nullptr);
      inputs[k].data[i] = saved - eps;
      const double down = evaluate(op, inputs, &w, nullptr);
      inputs[k].data[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double a = grads[k].data[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("tape ops match finite differences") {
  std::mt19937_64 rng(5);
  auto m = [&](int r, int c) { return random_matrix(r, c, rng); };
  struct Case {
    const char* name;
    Op op;
    std::vector<Matrix<double>> inputs;
  };
  std::vector<Case> cases{
      {"matmul", [](auto& t, const auto& v) { return t.matmul(v[0], v[1]); }, {m(3, 4), m(4, 2)}},
      {"matmul_nt", [](auto& t, const auto& v) { return t.matmul_nt(v[0], v[1]); }, {m(3, 4), m(2, 4)}},
      {"add", [](auto& t, const auto& v) { return t.add(v[0], v[1]); }, {m(2, 3), m(2, 3)}},
      {"add_row", [](auto& t, const auto& v) { return t.add_row(v[0], v[1]); }, {m(4, 3), m(1, 3)}},
      {"mul", [](auto& t, const auto& v) { return t.mul(v[0], v[1]); }, {m(2, 3), m(2, 3)}},
      {"one_minus", [](auto& t, const auto& v) { return t.one_minus(v[0]); }, {m(2, 2)}},
      {"sigmoid", [](auto& t, const auto& v) { return t.sigmoid(v[0]); }, {m(3, 3)}},
      {"tanh", [](auto& t, const auto& v) { return t.tanh(v[0]); }, {m(3, 3)}},
      {"concat", [](auto& t, const auto& v) { return t.concat_cols({v[0], v[1], v[0]}); }, {m(2, 2), m(2, 3)}},
      {"slice", [](auto& t, const auto& v) { return t.slice_cols(v[0], 1, 2); }, {m(3, 4)}},
      {"mean_rows", [](auto& t, const auto& v) { return t.mean_rows(v[0]); }, {m(4, 3)}},
      {"broadcast", [](auto& t, const auto& v) { return t.broadcast_rows(v[0], 3); }, {m(1, 4)}},
      {"row", [](auto& t, const auto& v) { return t.row(v[0], 2); }, {m(3, 4)}},
      {"masked_nll",
       [](auto& t, const auto& v) { return t.masked_nll(v[0], std::vector<char>{1, 0, 1, 1}, 3); },
       {m(4, 1)}},
      {"sum",
       [](auto& t, const auto& v) {
         std::vector<Var> parts{t.row(t.row(v[0], 0), 0), t.masked_nll(v[0], std::vector<char>{1, 1, 1}, 1)};
         return t.sum(parts);
       },
       {m(3, 1)}},
      {"gru-like composite",
       [](auto& t, const auto& v) {
         Var z = t.sigmoid(t.matmul(v[0], v[1]));
         return t.add(t.mul(z, v[0]), t.mul(t.one_minus(z), t.tanh(t.matmul(v[0], v[1]))));
       },
       {m(2, 3), m(3, 3)}},
  };
  for (auto& c : cases) {
    INFO(c.name);
    CHECK(max_gradient_error(c.op, c.inputs) < 1e-6);
  }
}

TEST_CASE("gather_rows scatters gradients into the table") {
  std::mt19937_64 rng(6);
  const auto table = random_matrix(5, 3, rng);
  Matrix<double> grad(5, 3);
  Tape<double> tape;
  Var rows = tape.gather_rows(table, &grad, {4, 1, 4});
  CHECK(tape.value(rows)(0, 2) == table(4, 2));
  Var left = tape.constant(Matrix<double>(1, 3, 1.0));
  Var right = tape.constant(Matrix<double>(3, 1, 1.0));
  tape.backward(tape.matmul(tape.matmul(left, rows), right));
  CHECK(grad(4, 0) == 2.0);
  CHECK(grad(1, 1) == 1.0);
  CHECK(grad(0, 0) == 0.0);
  CHECK_THROWS(tape.gather_rows(table, nullptr, {5}));
}

TEST_CASE("masked_nll is the negative log softmax over unmasked entries") {
  Tape<double> tape(false);
  Matrix<double> s(3, 1);
  s(0, 0) = 1.0;
  s(1, 0) = 100.0;
  s(2, 0) = 2.0;
  Var nll = tape.masked_nll(tape.constant(s), std::vector<char>{1, 0, 1}, 2);
  CHECK(tape.value(nll)(0, 0) == doctest::Approx(std::log(std::exp(1.0) + std::exp(2.0)) - 2.0));
  CHECK_THROWS(tape.masked_nll(tape.constant(s), std::vector<char>{1, 0, 1}, 1));
}

TEST_CASE("shape mismatches are rejected") {
  Tape<double> tape;
  Var a = tape.constant(Matrix<double>(2, 3));
  Var b = tape.constant(Matrix<double>(2, 2));
  CHECK_THROWS(tape.matmul(a, b));
  CHECK_THROWS(tape.add(a, b));
  CHECK_THROWS(tape.slice_cols(a, 2, 2));
}
