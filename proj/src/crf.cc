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

#include "csner/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csner/error.h"

namespace csner {
namespace {

void CheckShapes(const Tensor &em, const Tensor &trans) {
  const int L = em.cols();
  if (em.rows() < 1) throw ShapeMismatch("emissions need at least one row");
  if (trans.rows() != L + 2 || trans.cols() != L + 2) {
    throw ShapeMismatch("transitions must be (L+2)x(L+2) for L=" + std::to_string(L));
  }
}

void CheckTags(const Tensor &em, std::span<const int> tags) {
  if (static_cast<int>(tags.size()) != em.rows()) {
    throw LengthMismatch(std::to_string(tags.size()) + " tags for " +
                         std::to_string(em.rows()) + " positions");
  }
  for (int y : tags) {
    if (y < 0 || y >= em.cols()) throw OutOfRange("label " + std::to_string(y));
  }
}

double LogSumExp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

Tensor BioTransitionMask(const LabelSchema &schema) {
  const int L = schema.num_labels();
  Tensor mask(L + 2, L + 2);
  for (int to = 0; to < L; ++to) {
    Tag next = schema.LabelTag(to);
    if (next.kind != TagKind::kInside) continue;
    mask(CrfStart(L), to) = kImpossible;
    for (int from = 0; from < L; ++from) {
      Tag prev = schema.LabelTag(from);
      if (prev.outside() || prev.type != next.type) mask(from, to) = kImpossible;
    }
  }
  return mask;
}

double ScoreSequence(const Tensor &em, std::span<const int> tags, const Tensor &trans) {
  CheckShapes(em, trans);
  CheckTags(em, tags);
  const int L = em.cols();
  const int T = em.rows();
  double score = trans(CrfStart(L), tags[0]);
  for (int t = 0; t < T; ++t) {
    score += em(t, tags[t]);
    if (t + 1 < T) score += trans(tags[t], tags[t + 1]);
  }
  return score + trans(tags[T - 1], CrfStop(L));
}

double LogPartition(const Tensor &em, const Tensor &trans) {
  CheckShapes(em, trans);
  const int L = em.cols();
  const int T = em.rows();
  std::vector<double> alpha(L), next(L), terms(L);
  for (int j = 0; j < L; ++j) alpha[j] = trans(CrfStart(L), j) + em(0, j);
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < L; ++j) {
      for (int i = 0; i < L; ++i) terms[i] = alpha[i] + trans(i, j);
      next[j] = LogSumExp(terms) + em(t, j);
    }
    alpha.swap(next);
  }
  for (int i = 0; i < L; ++i) terms[i] = alpha[i] + trans(i, CrfStop(L));
  return LogSumExp(terms);
}

ViterbiResult Viterbi(const Tensor &em, const Tensor &trans, const Tensor *mask) {
  CheckShapes(em, trans);
  Tensor t = trans;
  if (mask != nullptr) t.Accumulate(*mask);
  const int L = em.cols();
  const int T = em.rows();

  std::vector<double> delta(L), next(L);
  std::vector<int> back(static_cast<size_t>(T) * L, 0);
  for (int j = 0; j < L; ++j) delta[j] = t(CrfStart(L), j) + em(0, j);
  for (int s = 1; s < T; ++s) {
    for (int j = 0; j < L; ++j) {
      int best = 0;
      double best_score = delta[0] + t(0, j);
      for (int i = 1; i < L; ++i) {
        double v = delta[i] + t(i, j);
        if (v > best_score) {
          best_score = v;
          best = i;
        }
      }
      next[j] = best_score + em(s, j);
      back[static_cast<size_t>(s) * L + j] = best;
    }
    delta.swap(next);
  }
  int last = 0;
  double best_final = delta[0] + t(0, CrfStop(L));
  for (int i = 1; i < L; ++i) {
    double v = delta[i] + t(i, CrfStop(L));
    if (v > best_final) {
      best_final = v;
      last = i;
    }
  }

  ViterbiResult result;
  result.tags.assign(T, 0);
  result.tags[T - 1] = last;
  for (int s = T - 1; s > 0; --s) {
    result.tags[s - 1] = back[static_cast<size_t>(s) * L + result.tags[s]];
  }
  result.score = ScoreSequence(em, result.tags, trans);
  return result;
}

Var ScoreSequence(Var em, std::span<const int> tags, Var trans) {
  CheckShapes(em.value(), trans.value());
  CheckTags(em.value(), tags);
  const int L = em.cols();
  const int T = em.rows();
  Var score = Pick(trans, CrfStart(L), tags[0]);
  for (int t = 0; t < T; ++t) {
    score = Add(score, Pick(em, t, tags[t]));
    if (t + 1 < T) score = Add(score, Pick(trans, tags[t], tags[t + 1]));
  }
  return Add(score, Pick(trans, tags[T - 1], CrfStop(L)));
}

Var LogPartition(Var em, Var trans) {
  CheckShapes(em.value(), trans.value());
  const int L = em.cols();
  const int T = em.rows();
  Var from_start = SliceCols(SliceRows(trans, CrfStart(L), CrfStart(L) + 1), 0, L);
  Var alpha = Add(from_start, SliceRows(em, 0, 1));
  if (T > 1) {
    // inner_t(j, i) = trans(i, j), so AddRow(inner_t, alpha) holds
    // alpha(i) + trans(i, j) in row j.
    Var inner_t = Transpose(SliceCols(SliceRows(trans, 0, L), 0, L));
    for (int t = 1; t < T; ++t) {
      Var scores = AddRow(inner_t, alpha);
      alpha = Add(Transpose(LogSumExp(scores, 1)), SliceRows(em, t, t + 1));
    }
  }
  Var to_stop = Transpose(SliceRows(SliceCols(trans, CrfStop(L), CrfStop(L) + 1), 0, L));
  return LogSumExp(Add(alpha, to_stop), 1);
}

Var Nll(Var em, std::span<const int> gold, Var trans) {
  return Sub(LogPartition(em, trans), ScoreSequence(em, gold, trans));
}

}  // namespace csner
