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

#ifndef CSNER_EVAL_H_
#define CSNER_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csner/corpus.h"
#include "csner/schema.h"

namespace csner {

struct ConfusionCounts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  // Tokens outside every span of the type in both sequences. Recorded for
  // bookkeeping; precision, recall and F1 ignore it.
  int64_t tn = 0;

  ConfusionCounts &operator+=(const ConfusionCounts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts &, const ConfusionCounts &) = default;
};

// Percentages. P is 0 when nothing was predicted, R is 0 when nothing was
// expected, F1 is 0 when P + R is 0.
struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Scores From(const ConfusionCounts &c);
};

struct TypeReport {
  std::string type;
  ConfusionCounts counts;
  Scores scores;
  int64_t support = 0;  // gold spans
};

struct EvaluationReport {
  ConfusionCounts micro_counts;
  Scores micro;
  std::vector<TypeReport> per_type;  // schema order
};

// Exact-match span scoring. Spans come from DecodeBio with repair on. Throws
// AlignmentError when sentence or token counts differ.
EvaluationReport Evaluate(const Corpus &gold, std::span<const std::vector<Tag>> predicted);
// Same counts computed one sentence after another; reference for Evaluate,
// which spreads sentences over OpenMP threads.
EvaluationReport EvaluateSerial(const Corpus &gold,
                                std::span<const std::vector<Tag>> predicted);
// Predictions read from a second corpus over the same tokens.
EvaluationReport Evaluate(const Corpus &gold, const Corpus &predicted);

// Per-sentence counts; index 0..num_types-1 per type.
std::vector<ConfusionCounts> SentenceCounts(std::span<const Tag> gold,
                                            std::span<const Tag> predicted, int num_types);

// Plain-text table: one row per type with P, R, F1 and support, then the
// micro row.
std::string FormatReport(const EvaluationReport &report);

struct AgreementReport {
  double cohen_kappa = 0.0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  int64_t items = 0;
  // Annotator A taken as gold.
  EvaluationReport spans;
};

// kappa = (p_o - p_e) / (1 - p_e) over paired labels. When p_e is 1 both
// annotators used one label throughout and kappa is defined as 1.
double CohensKappa(std::span<const int> a, std::span<const int> b, int num_labels,
                   double *observed = nullptr, double *expected = nullptr);

// Token-level kappa over BIO labels pooled across sentences, plus span
// scores. Throws TokenMismatch unless both corpora hold the same tokens.
AgreementReport Agreement(const Corpus &a, const Corpus &b);

std::string FormatAgreement(const AgreementReport &report, const LabelSchema &schema);

}  // namespace csner

#endif  // CSNER_EVAL_H_
