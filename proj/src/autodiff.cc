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

#include "csner/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csner/error.h"
#include "csner/kernels.h"

namespace csner {
namespace {

std::string ShapeString(const Tensor &t) {
  return "(" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + ")";
}

void RequireSameShape(const Tensor &a, const Tensor &b, const char *op) {
  if (!a.SameShape(b)) {
    throw ShapeMismatch(std::string(op) + ": " + ShapeString(a) + " vs " + ShapeString(b));
  }
}

Tape &TapeOf(Var a) {
  if (a.tape() == nullptr) throw ShapeMismatch("variable is not bound to a tape");
  return *a.tape();
}

Tape &TapeOf(Var a, Var b) {
  if (a.tape() != b.tape()) throw ShapeMismatch("operands live on different tapes");
  return TapeOf(a);
}

template <typename Fwd, typename Deriv>
Var Elementwise(Var a, Fwd fwd, Deriv deriv_from_output) {
  Tape &tape = TapeOf(a);
  const Tensor &x = a.value();
  Tensor y(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) y[i] = fwd(x[i]);
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, deriv_from_output](Tape &t, int self) {
    const Tensor &out = t.value(self);
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * deriv_from_output(out[i], t.value(ia)[i]);
  });
}

}  // namespace

// --- Tensor ---------------------------------------------------------------

Tensor::Tensor(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw ShapeMismatch("negative dimension");
}

Tensor::Tensor(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<size_t>(rows) * cols) {
    throw ShapeMismatch("data length does not match shape");
  }
}

Tensor Tensor::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  std::vector<double> data;
  data.reserve(static_cast<size_t>(r) * c);
  for (const auto &row : rows) {
    if (static_cast<int>(row.size()) != c) throw ShapeMismatch("ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(data));
}

void Tensor::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::Accumulate(const Tensor &other) {
  RequireSameShape(*this, other, "accumulate");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

// --- Var / Tape -----------------------------------------------------------

const Tensor &Var::value() const { return tape_->value(id_); }

const Tensor &Var::grad() const { return tape_->grad(id_); }

Var Tape::Record(Tensor value, BackwardFn backward) {
  nodes_.push_back({std::move(value), Tensor(), nullptr, std::move(backward)});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Tensor &Tape::value(int id) const {
  const Node &n = nodes_.at(id);
  return n.external != nullptr ? *n.external : n.value;
}

Tensor &Tape::grad(int id) {
  Node &n = nodes_.at(id);
  if (n.grad.size() != value(id).size() || n.grad.rows() != value(id).rows()) {
    n.grad = Tensor(value(id).rows(), value(id).cols());
  }
  return n.grad;
}

Var Tape::Constant(Tensor value) { return Record(std::move(value), nullptr); }

Parameter *Tape::Tracked(const Parameter *param) const {
  auto it = tracked_.find(param);
  if (it == tracked_.end()) return nullptr;
  Parameter *p = it->second;
  if (!p->grad.SameShape(p->value)) p->grad = Tensor(p->value.rows(), p->value.cols());
  return p;
}

Var Tape::Param(const Parameter &param) {
  const Parameter *p = &param;
  nodes_.push_back({Tensor(), Tensor(), &param.value,
                    [p](Tape &t, int self) {
                      if (Parameter *target = t.Tracked(p)) target->grad.Accumulate(t.grad(self));
                    }});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Gather(const Parameter &table, std::span<const int> rows) {
  const int d = table.value.cols();
  Tensor out(static_cast<int>(rows.size()), d);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= table.value.rows()) {
      throw ShapeMismatch("gather row " + std::to_string(rows[i]) + " out of range");
    }
    auto src = table.value.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(static_cast<int>(i)).begin());
  }
  const Parameter *p = &table;
  std::vector<int> idx(rows.begin(), rows.end());
  return Record(std::move(out), [p, idx = std::move(idx)](Tape &t, int self) {
    Parameter *target = t.Tracked(p);
    if (target == nullptr) return;
    const Tensor &g = t.grad(self);
    for (size_t i = 0; i < idx.size(); ++i) {
      auto src = g.row(static_cast<int>(i));
      auto dst = target->grad.row(idx[i]);
      for (size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
  });
}

void Tape::Backward(Var loss) {
  if (loss.tape() != this) throw ShapeMismatch("loss is not on this tape");
  const Tensor &lv = value(loss.id());
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw NotScalar("loss has shape " + ShapeString(lv));
  }
  for (int i = 0; i < size(); ++i) {
    Tensor &g = grad(i);
    g.Fill(0.0);
  }
  grad(loss.id())[0] = 1.0;
  for (int i = loss.id(); i >= 0; --i) {
    if (nodes_[i].backward) nodes_[i].backward(*this, i);
  }
}

// --- Operations -----------------------------------------------------------

Var Add(Var a, Var b) {
  Tape &tape = TapeOf(a, b);
  RequireSameShape(a.value(), b.value(), "add");
  Tensor y = a.value();
  y.Accumulate(b.value());
  const int ia = a.id(), ib = b.id();
  return tape.Record(std::move(y), [ia, ib](Tape &t, int self) {
    t.grad(ia).Accumulate(t.grad(self));
    t.grad(ib).Accumulate(t.grad(self));
  });
}

Var Sub(Var a, Var b) {
  Tape &tape = TapeOf(a, b);
  RequireSameShape(a.value(), b.value(), "sub");
  Tensor y = a.value();
  const Tensor &bv = b.value();
  for (size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  const int ia = a.id(), ib = b.id();
  return tape.Record(std::move(y), [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    t.grad(ia).Accumulate(g);
    Tensor &gb = t.grad(ib);
    for (size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

Var Mul(Var a, Var b) {
  Tape &tape = TapeOf(a, b);
  RequireSameShape(a.value(), b.value(), "hadamard");
  Tensor y = a.value();
  const Tensor &bv = b.value();
  for (size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const int ia = a.id(), ib = b.id();
  return tape.Record(std::move(y), [ia, ib](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &av = t.value(ia);
    const Tensor &bv = t.value(ib);
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    Tensor &gb = t.grad(ib);
    for (size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
  });
}

Var Scale(Var a, double factor) {
  Tape &tape = TapeOf(a);
  Tensor y = a.value();
  for (size_t i = 0; i < y.size(); ++i) y[i] *= factor;
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, factor](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Var MatMul(Var a, Var b) {
  Tape &tape = TapeOf(a, b);
  const Tensor &av = a.value();
  const Tensor &bv = b.value();
  if (av.cols() != bv.rows()) {
    throw ShapeMismatch("matmul: " + ShapeString(av) + " x " + ShapeString(bv));
  }
  const size_t m = av.rows(), k = av.cols(), n = bv.cols();
  Tensor y(av.rows(), bv.cols());
  kernels::Gemm(av.data(), kernels::Trans::kNo, bv.data(), kernels::Trans::kNo,
                y.data(), m, k, n);
  const int ia = a.id(), ib = b.id();
  return tape.Record(std::move(y), [ia, ib, m, k, n](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    kernels::Gemm(g.data(), kernels::Trans::kNo, t.value(ib).data(),
                  kernels::Trans::kYes, t.grad(ia).data(), m, n, k);
    kernels::Gemm(t.value(ia).data(), kernels::Trans::kYes, g.data(),
                  kernels::Trans::kNo, t.grad(ib).data(), k, m, n);
  });
}

Var AddRow(Var m, Var row) {
  Tape &tape = TapeOf(m, row);
  const Tensor &mv = m.value();
  const Tensor &rv = row.value();
  if (rv.rows() != 1 || rv.cols() != mv.cols()) {
    throw ShapeMismatch("add_row: " + ShapeString(mv) + " + " + ShapeString(rv));
  }
  Tensor y = mv;
  for (int r = 0; r < y.rows(); ++r) {
    for (int c = 0; c < y.cols(); ++c) y(r, c) += rv(0, c);
  }
  const int im = m.id(), ir = row.id();
  return tape.Record(std::move(y), [im, ir](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    t.grad(im).Accumulate(g);
    Tensor &gr = t.grad(ir);
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) gr(0, c) += g(r, c);
    }
  });
}

Var Transpose(Var a) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  Tensor y(av.cols(), av.rows());
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = 0; c < av.cols(); ++c) y(c, r) = av(r, c);
  }
  const int ia = a.id();
  return tape.Record(std::move(y), [ia](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (int r = 0; r < ga.rows(); ++r) {
      for (int c = 0; c < ga.cols(); ++c) ga(r, c) += g(c, r);
    }
  });
}

Var Concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw ShapeMismatch("concat of nothing");
  if (axis != 0 && axis != 1) throw ShapeMismatch("concat axis must be 0 or 1");
  Tape &tape = TapeOf(parts[0]);
  int rows = 0, cols = 0;
  for (const Var &p : parts) {
    TapeOf(parts[0], p);
    const Tensor &v = p.value();
    if (axis == 0) {
      if (p.id() != parts[0].id() && v.cols() != parts[0].cols()) {
        throw ShapeMismatch("concat rows: column counts differ");
      }
      rows += v.rows();
      cols = v.cols();
    } else {
      if (v.rows() != parts[0].rows()) throw ShapeMismatch("concat cols: row counts differ");
      cols += v.cols();
      rows = v.rows();
    }
  }
  Tensor y(rows, cols);
  std::vector<int> ids;
  std::vector<int> offsets;
  int offset = 0;
  for (const Var &p : parts) {
    const Tensor &v = p.value();
    for (int r = 0; r < v.rows(); ++r) {
      for (int c = 0; c < v.cols(); ++c) {
        if (axis == 0) {
          y(offset + r, c) = v(r, c);
        } else {
          y(r, offset + c) = v(r, c);
        }
      }
    }
    ids.push_back(p.id());
    offsets.push_back(offset);
    offset += axis == 0 ? v.rows() : v.cols();
  }
  return tape.Record(std::move(y), [ids = std::move(ids), offsets = std::move(offsets),
                                    axis](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    for (size_t k = 0; k < ids.size(); ++k) {
      Tensor &gp = t.grad(ids[k]);
      for (int r = 0; r < gp.rows(); ++r) {
        for (int c = 0; c < gp.cols(); ++c) {
          gp(r, c) += axis == 0 ? g(offsets[k] + r, c) : g(r, offsets[k] + c);
        }
      }
    }
  });
}

Var SliceRows(Var a, int begin, int end) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  if (begin < 0 || begin >= end || end > av.rows()) {
    throw ShapeMismatch("slice rows [" + std::to_string(begin) + "," +
                        std::to_string(end) + ") of " + ShapeString(av));
  }
  const int cols = av.cols();
  Tensor y(end - begin, cols,
           std::vector<double>(av.data() + static_cast<size_t>(begin) * cols,
                               av.data() + static_cast<size_t>(end) * cols));
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, begin](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    double *dst = t.grad(ia).data() + static_cast<size_t>(begin) * g.cols();
    for (size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  });
}

Var SliceCols(Var a, int begin, int end) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  if (begin < 0 || begin >= end || end > av.cols()) {
    throw ShapeMismatch("slice cols [" + std::to_string(begin) + "," +
                        std::to_string(end) + ") of " + ShapeString(av));
  }
  Tensor y(av.rows(), end - begin);
  for (int r = 0; r < av.rows(); ++r) {
    for (int c = begin; c < end; ++c) y(r, c - begin) = av(r, c);
  }
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, begin](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) ga(r, begin + c) += g(r, c);
    }
  });
}

Var Tanh(Var a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double y, double) { return 1.0 - y * y; });
}

Var Sigmoid(Var a) {
  return Elementwise(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double y, double) { return y * (1.0 - y); });
}

Var Relu(Var a) {
  return Elementwise(
      a, [](double x) { return x > 0 ? x : 0.0; },
      [](double, double x) { return x > 0 ? 1.0 : 0.0; });
}

namespace {

// Visits every reduction lane of `a` along `axis`: fn(out_index, element
// indices as (offset, stride, count)).
template <typename Fn>
void ForEachLane(const Tensor &a, int axis, Fn fn) {
  if (axis == 0) {
    for (int c = 0; c < a.cols(); ++c) fn(c, static_cast<size_t>(c), static_cast<size_t>(a.cols()), a.rows());
  } else {
    for (int r = 0; r < a.rows(); ++r) fn(r, static_cast<size_t>(r) * a.cols(), size_t{1}, a.cols());
  }
}

void CheckReduction(const Tensor &a, int axis, const char *op) {
  if (axis != 0 && axis != 1) throw ShapeMismatch(std::string(op) + ": axis must be 0 or 1");
  if (a.size() == 0) throw ShapeMismatch(std::string(op) + ": empty input");
}

}  // namespace

Var MaxOverAxis(Var a, int axis) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  CheckReduction(av, axis, "max_over_axis");
  Tensor y = axis == 0 ? Tensor(1, av.cols()) : Tensor(av.rows(), 1);
  std::vector<size_t> argmax(y.size());
  ForEachLane(av, axis, [&](int out, size_t offset, size_t stride, int count) {
    size_t best = offset;
    for (int i = 1; i < count; ++i) {
      size_t idx = offset + i * stride;
      if (av[idx] > av[best]) {
        best = idx;
      } else if (av[idx] == av[best]) {
        tape.NoteTie();
      }
    }
    argmax[out] = best;
    y[out] = av[best];
  });
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, argmax = std::move(argmax)](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < argmax.size(); ++i) ga[argmax[i]] += g[i];
  });
}

Var LogSumExp(Var a, int axis) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  CheckReduction(av, axis, "log_sum_exp");
  Tensor y = axis == 0 ? Tensor(1, av.cols()) : Tensor(av.rows(), 1);
  ForEachLane(av, axis, [&](int out, size_t offset, size_t stride, int count) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) m = std::max(m, av[offset + i * stride]);
    double s = 0.0;
    for (int i = 0; i < count; ++i) s += std::exp(av[offset + i * stride] - m);
    y[out] = m + std::log(s);
  });
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, axis](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    const Tensor &out = t.value(self);
    const Tensor &x = t.value(ia);
    Tensor &ga = t.grad(ia);
    ForEachLane(x, axis, [&](int o, size_t offset, size_t stride, int count) {
      for (int i = 0; i < count; ++i) {
        size_t idx = offset + i * stride;
        ga[idx] += g[o] * std::exp(x[idx] - out[o]);
      }
    });
  });
}

Var Dropout(Var a, double rate, bool train, Rng &rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw BadConfig("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!train || rate == 0.0) return a;
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(av.size());
  Tensor y(av.rows(), av.cols());
  for (size_t i = 0; i < av.size(); ++i) {
    mask[i] = rng.Uniform01() >= rate ? keep_scale : 0.0;
    y[i] = av[i] * mask[i];
  }
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, mask = std::move(mask)](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * mask[i];
  });
}

Var Sum(Var a) {
  Tape &tape = TapeOf(a);
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const int ia = a.id();
  return tape.Record(Tensor::Scalar(s), [ia](Tape &t, int self) {
    const double g = t.grad(self)[0];
    Tensor &ga = t.grad(ia);
    for (size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var Pick(Var a, int row, int col) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  if (row < 0 || row >= av.rows() || col < 0 || col >= av.cols()) {
    throw ShapeMismatch("pick (" + std::to_string(row) + "," + std::to_string(col) +
                        ") of " + ShapeString(av));
  }
  const int ia = a.id();
  return tape.Record(Tensor::Scalar(av(row, col)), [ia, row, col](Tape &t, int self) {
    t.grad(ia)(row, col) += t.grad(self)[0];
  });
}

Var Unfold(Var a, int window) {
  Tape &tape = TapeOf(a);
  const Tensor &av = a.value();
  if (window < 1 || window > av.rows()) {
    throw ShapeMismatch("unfold window " + std::to_string(window) + " over " + ShapeString(av));
  }
  const int n = av.rows() - window + 1;
  const int d = av.cols();
  Tensor y(n, window * d);
  for (int i = 0; i < n; ++i) {
    std::copy(av.data() + static_cast<size_t>(i) * d,
              av.data() + static_cast<size_t>(i + window) * d, y.row(i).begin());
  }
  const int ia = a.id();
  return tape.Record(std::move(y), [ia, window, d](Tape &t, int self) {
    const Tensor &g = t.grad(self);
    Tensor &ga = t.grad(ia);
    for (int i = 0; i < g.rows(); ++i) {
      double *dst = ga.data() + static_cast<size_t>(i) * d;
      auto src = g.row(i);
      for (int j = 0; j < window * d; ++j) dst[j] += src[j];
    }
  });
}

// --- Gradient checking ----------------------------------------------------

namespace {

double RelError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

}  // namespace

GradCheckResult GradCheck(const std::function<Var(Tape &, Var)> &f,
                          const Tensor &x, double eps) {
  GradCheckResult result;
  Tensor analytic;
  {
    Tape tape;
    Var in = tape.Constant(x);
    Var out = f(tape, in);
    tape.Backward(out);
    analytic = in.grad();
    result.tie = tape.max_ties() > 0;
  }
  Tensor probe = x;
  for (size_t i = 0; i < x.size(); ++i) {
    auto eval = [&](double v) {
      probe[i] = v;
      Tape tape;
      double r = f(tape, tape.Constant(probe)).scalar();
      result.tie = result.tie || tape.max_ties() > 0;
      return r;
    };
    const double numeric = (eval(x[i] + eps) - eval(x[i] - eps)) / (2 * eps);
    probe[i] = x[i];
    result.max_rel_error = std::max(result.max_rel_error, RelError(analytic[i], numeric));
  }
  return result;
}

GradCheckResult GradCheckParams(const std::function<Var(Tape &)> &f,
                                std::span<Parameter *const> params, double eps) {
  GradCheckResult result;
  for (Parameter *p : params) p->grad = Tensor(p->value.rows(), p->value.cols());
  {
    Tape tape;
    for (Parameter *p : params) tape.Track(*p);
    Var out = f(tape);
    tape.Backward(out);
    result.tie = tape.max_ties() > 0;
  }
  for (Parameter *p : params) {
    for (size_t i = 0; i < p->value.size(); ++i) {
      const double original = p->value[i];
      auto eval = [&](double v) {
        p->value[i] = v;
        Tape tape;
        double r = f(tape).scalar();
        result.tie = result.tie || tape.max_ties() > 0;
        return r;
      };
      const double numeric = (eval(original + eps) - eval(original - eps)) / (2 * eps);
      p->value[i] = original;
      result.max_rel_error = std::max(result.max_rel_error, RelError(p->grad[i], numeric));
    }
  }
  return result;
}

}  // namespace csner
