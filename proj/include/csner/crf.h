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

#ifndef CSNER_CRF_H_
#define CSNER_CRF_H_

#include <span>
#include <vector>

#include "csner/autodiff.h"
#include "csner/schema.h"

namespace csner {

// Linear-chain CRF over L labels. Transitions form an (L+2) x (L+2) matrix
// where row/column L is START and L+1 is STOP; trans(i, j) scores i -> j.
// Only trans(START, y), trans(y, y') and trans(y, STOP) are ever read, so
// START has no incoming and STOP no outgoing transitions.
struct CrfParams {
  Parameter transitions;

  CrfParams() = default;
  explicit CrfParams(int num_labels)
      : transitions("crf.transitions", Tensor(num_labels + 2, num_labels + 2)) {}

  int num_labels() const { return transitions.value.rows() - 2; }
};

inline int CrfStart(int num_labels) { return num_labels; }
inline int CrfStop(int num_labels) { return num_labels + 1; }

// Stand-in for log 0 inside log-space arithmetic.
inline constexpr double kImpossible = -1e4;

// Additive (L+2) x (L+2) mask: 0 where a transition keeps the BIO sequence
// valid, kImpossible for START -> I-x, O -> I-x and B-x/I-x -> I-y (x != y).
Tensor BioTransitionMask(const LabelSchema &schema);

// --- Plain evaluation ----------------------------------------------------
// `em` is T x L, `trans` is (L+2) x (L+2). Throw LengthMismatch when the tag
// count differs from T, ShapeMismatch on inconsistent shapes.

double ScoreSequence(const Tensor &em, std::span<const int> tags, const Tensor &trans);

// Forward recursion in log space.
double LogPartition(const Tensor &em, const Tensor &trans);

struct ViterbiResult {
  std::vector<int> tags;
  double score = 0.0;
};

// Highest-scoring path; `mask`, when given, is added to the transitions
// during the search. Ties go to the lower label index. The returned score
// is ScoreSequence of the returned path under the unmasked transitions.
ViterbiResult Viterbi(const Tensor &em, const Tensor &trans, const Tensor *mask = nullptr);

// --- Differentiable versions ----------------------------------------------

Var ScoreSequence(Var em, std::span<const int> tags, Var trans);
Var LogPartition(Var em, Var trans);
// log Z - score(gold).
Var Nll(Var em, std::span<const int> gold, Var trans);

}  // namespace csner

#endif  // CSNER_CRF_H_
