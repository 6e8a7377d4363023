// Copyright 2026 The csner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CSNER_AUTODIFF_H_
#define CSNER_AUTODIFF_H_

#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csner/random.h"

namespace csner {

// Dense row-major float64 matrix. Vectors are 1 x n, scalars 1 x 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, double fill = 0.0);
  Tensor(int rows, int cols, std::vector<double> data);
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor Scalar(double v) { return Tensor(1, 1, v); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool SameShape(const Tensor &o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double &operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double &operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  std::span<double> row(int r) { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)}; }

  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }
  const std::vector<double> &values() const { return data_; }

  void Fill(double v);
  // this += other (same shape).
  void Accumulate(const Tensor &other);

  friend bool operator==(const Tensor &, const Tensor &) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// A named trainable tensor that lives outside any tape. Tapes read `value`
// in place and accumulate into `grad`.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool train = true)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows(), value.cols()), trainable(train) {}

  void ZeroGrad() { grad.Fill(0.0); }
};

class Tape;

// Handle to a node of a tape. Cheap to copy; valid while its tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape *tape, int id) : tape_(tape), id_(id) {}

  const Tensor &value() const;
  const Tensor &grad() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }

  Tape *tape() const { return tape_; }
  int id() const { return id_; }

 private:
  Tape *tape_ = nullptr;
  int id_ = -1;
};

// Dynamic reverse-mode tape. Nodes are appended in evaluation order, so a
// reverse sweep visits every node after all of its consumers. A tape is
// used by one thread and rebuilt per example.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  // Leaf holding its own copy of `value`; receives a gradient on Backward.
  Var Constant(Tensor value);
  // Leaf aliasing a parameter. Backward adds its gradient to `param.grad`
  // only for tracked parameters; the non-const overloads track implicitly.
  Var Param(const Parameter &param);
  Var Param(Parameter &param) {
    Track(param);
    return Param(std::as_const(param));
  }
  // Rows of a parameter table; backward scatters into the selected rows.
  Var Gather(const Parameter &table, std::span<const int> rows);
  Var Gather(Parameter &table, std::span<const int> rows) {
    Track(table);
    return Gather(std::as_const(table), rows);
  }
  void Track(Parameter &param) { tracked_[&param] = &param; }

  // Populates grad of every node reachable from `loss` (which must be 1 x 1,
  // else NotScalar). Gradients accumulate into parameter grads.
  void Backward(Var loss);

  int size() const { return static_cast<int>(nodes_.size()); }
  // Number of exact ties seen by max reductions, whose gradient is only a
  // subgradient.
  int max_ties() const { return max_ties_; }

  // Used by op implementations.
  using BackwardFn = std::function<void(Tape &, int self)>;
  Var Record(Tensor value, BackwardFn backward);
  const Tensor &value(int id) const;
  Tensor &grad(int id);
  void NoteTie() { ++max_ties_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    const Tensor *external = nullptr;
    BackwardFn backward;
  };
  Parameter *Tracked(const Parameter *param) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter *, Parameter *> tracked_;
  int max_ties_ = 0;
};

// --- Operations --------------------------------------------------------
// All operands must come from the same tape. Shape errors throw
// ShapeMismatch.

Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // Hadamard
Var Scale(Var a, double factor);
Var MatMul(Var a, Var b);
// Adds a 1 x cols row vector to every row of `m`.
Var AddRow(Var m, Var row);
Var Transpose(Var a);
// axis 0 stacks rows, axis 1 joins columns.
Var Concat(std::span<const Var> parts, int axis);
Var SliceRows(Var a, int begin, int end);
Var SliceCols(Var a, int begin, int end);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);
// Reduces the axis away: axis 0 gives 1 x cols, axis 1 gives rows x 1.
Var MaxOverAxis(Var a, int axis);
// Max-shifted log-sum-exp over an axis, same shapes as MaxOverAxis.
Var LogSumExp(Var a, int axis);
// Inverted dropout: kept units scale by 1/(1-rate) in train mode; identity
// otherwise. rate must lie in [0, 1).
Var Dropout(Var a, double rate, bool train, Rng &rng);
Var Sum(Var a);
Var Pick(Var a, int row, int col);
// Sliding windows over rows: (n x d) -> ((n-w+1) x (w*d)); row i is rows
// i..i+w-1 laid end to end.
Var Unfold(Var a, int window);

// --- Gradient checking ---------------------------------------------------

struct GradCheckResult {
  // max over coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|)
  double max_rel_error = 0.0;
  // Set when a max reduction hit a tie; the error is then not meaningful.
  bool tie = false;
};

// Central differences of a scalar function of one input tensor.
GradCheckResult GradCheck(const std::function<Var(Tape &, Var)> &f,
                          const Tensor &x, double eps = 1e-5);

// Central differences with respect to every entry of the given parameters.
GradCheckResult GradCheckParams(const std::function<Var(Tape &)> &f,
                                std::span<Parameter *const> params,
                                double eps = 1e-5);

}  // namespace csner

#endif  // CSNER_AUTODIFF_H_
