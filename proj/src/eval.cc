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

#include "csner/eval.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "csner/error.h"

namespace csner {
namespace {

void CheckAligned(const Corpus &gold, std::span<const std::vector<Tag>> predicted) {
  if (gold.sentences.size() != predicted.size()) {
    throw AlignmentError(std::to_string(predicted.size()) + " predictions for " +
                         std::to_string(gold.sentences.size()) + " sentences");
  }
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (static_cast<int>(predicted[i].size()) != gold.sentences[i].size()) {
      throw AlignmentError("sentence " + std::to_string(i) + " has " +
                           std::to_string(gold.sentences[i].size()) + " tokens but " +
                           std::to_string(predicted[i].size()) + " predicted tags");
    }
  }
}

EvaluationReport Finish(const LabelSchema &schema, std::vector<ConfusionCounts> counts,
                        std::vector<int64_t> support) {
  EvaluationReport report;
  for (int k = 0; k < schema.num_types(); ++k) {
    TypeReport t;
    t.type = schema.type_name(k);
    t.counts = counts[k];
    t.scores = Scores::From(counts[k]);
    t.support = support[k];
    report.micro_counts += counts[k];
    report.per_type.push_back(std::move(t));
  }
  report.micro = Scores::From(report.micro_counts);
  return report;
}

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Pad(const std::string &s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string PadLeft(const std::string &s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

Scores Scores::From(const ConfusionCounts &c) {
  Scores s;
  if (c.tp + c.fp > 0) s.precision = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (s.precision + s.recall > 0) {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

std::vector<ConfusionCounts> SentenceCounts(std::span<const Tag> gold,
                                            std::span<const Tag> predicted, int num_types) {
  if (gold.size() != predicted.size()) throw AlignmentError("tag sequences differ in length");
  std::vector<ConfusionCounts> counts(num_types);
  std::vector<EntitySpan> g = DecodeBio(gold, true);
  std::vector<EntitySpan> p = DecodeBio(predicted, true);
  std::sort(g.begin(), g.end());
  std::sort(p.begin(), p.end());
  std::vector<EntitySpan> common;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(common));
  for (const auto &s : common) ++counts[s.type].tp;
  for (const auto &s : p) ++counts[s.type].fp;
  for (const auto &s : g) ++counts[s.type].fn;
  for (auto &c : counts) {
    c.fp -= c.tp;
    c.fn -= c.tp;
  }
  const int n = static_cast<int>(gold.size());
  for (int k = 0; k < num_types; ++k) {
    for (int i = 0; i < n; ++i) {
      bool in_gold = !gold[i].outside() && gold[i].type == k;
      bool in_pred = !predicted[i].outside() && predicted[i].type == k;
      if (!in_gold && !in_pred) ++counts[k].tn;
    }
  }
  return counts;
}

EvaluationReport EvaluateSerial(const Corpus &gold,
                                std::span<const std::vector<Tag>> predicted) {
  CheckAligned(gold, predicted);
  const int types = gold.schema.num_types();
  std::vector<ConfusionCounts> total(types);
  std::vector<int64_t> support(types, 0);
  for (size_t i = 0; i < predicted.size(); ++i) {
    std::vector<Tag> g = gold.sentences[i].tags();
    auto counts = SentenceCounts(g, predicted[i], types);
    for (int k = 0; k < types; ++k) {
      total[k] += counts[k];
      support[k] += counts[k].tp + counts[k].fn;
    }
  }
  return Finish(gold.schema, std::move(total), std::move(support));
}

EvaluationReport Evaluate(const Corpus &gold, std::span<const std::vector<Tag>> predicted) {
  CheckAligned(gold, predicted);
  const int types = gold.schema.num_types();
  const int64_t n = static_cast<int64_t>(predicted.size());
  std::vector<std::vector<ConfusionCounts>> per_sentence(predicted.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < n; ++i) {
    std::vector<Tag> g = gold.sentences[i].tags();
    per_sentence[i] = SentenceCounts(g, predicted[i], types);
  }
  std::vector<ConfusionCounts> total(types);
  std::vector<int64_t> support(types, 0);
  for (const auto &counts : per_sentence) {
    for (int k = 0; k < types; ++k) {
      total[k] += counts[k];
      support[k] += counts[k].tp + counts[k].fn;
    }
  }
  return Finish(gold.schema, std::move(total), std::move(support));
}

EvaluationReport Evaluate(const Corpus &gold, const Corpus &predicted) {
  if (gold.sentences.size() != predicted.sentences.size()) {
    throw AlignmentError(std::to_string(predicted.sentences.size()) + " predicted sentences for " +
                         std::to_string(gold.sentences.size()) + " gold sentences");
  }
  if (!(gold.schema == predicted.schema)) throw AlignmentError("schemas differ");
  std::vector<std::vector<Tag>> tags;
  tags.reserve(predicted.sentences.size());
  for (size_t i = 0; i < predicted.sentences.size(); ++i) {
    if (gold.sentences[i].surfaces() != predicted.sentences[i].surfaces()) {
      throw AlignmentError("sentence " + std::to_string(i) + " tokens differ");
    }
    tags.push_back(predicted.sentences[i].tags());
  }
  return Evaluate(gold, tags);
}

std::string FormatReport(const EvaluationReport &report) {
  std::ostringstream out;
  out << Pad("type", 20) << PadLeft("P", 8) << PadLeft("R", 8) << PadLeft("F1", 8)
      << PadLeft("support", 9) << '\n';
  for (const auto &t : report.per_type) {
    out << Pad(t.type, 20) << PadLeft(Fixed2(t.scores.precision), 8)
        << PadLeft(Fixed2(t.scores.recall), 8) << PadLeft(Fixed2(t.scores.f1), 8)
        << PadLeft(std::to_string(t.support), 9) << '\n';
  }
  out << Pad("micro", 20) << PadLeft(Fixed2(report.micro.precision), 8)
      << PadLeft(Fixed2(report.micro.recall), 8) << PadLeft(Fixed2(report.micro.f1), 8)
      << PadLeft(std::to_string(report.micro_counts.tp + report.micro_counts.fn), 9) << '\n';
  return out.str();
}

double CohensKappa(std::span<const int> a, std::span<const int> b, int num_labels,
                   double *observed, double *expected) {
  if (a.size() != b.size()) throw TokenMismatch("label sequences differ in length");
  if (a.empty()) throw TokenMismatch("no items to compare");
  std::vector<int64_t> count_a(num_labels, 0), count_b(num_labels, 0);
  int64_t agree = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= num_labels || b[i] < 0 || b[i] >= num_labels) {
      throw OutOfRange("label outside [0, " + std::to_string(num_labels) + ")");
    }
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  const double n = static_cast<double>(a.size());
  const double po = static_cast<double>(agree) / n;
  double pe = 0.0;
  for (int k = 0; k < num_labels; ++k) {
    pe += (static_cast<double>(count_a[k]) / n) * (static_cast<double>(count_b[k]) / n);
  }
  if (observed != nullptr) *observed = po;
  if (expected != nullptr) *expected = pe;
  if (pe >= 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

AgreementReport Agreement(const Corpus &a, const Corpus &b) {
  if (a.sentences.size() != b.sentences.size()) {
    throw TokenMismatch(std::to_string(a.sentences.size()) + " vs " +
                        std::to_string(b.sentences.size()) + " sentences");
  }
  if (!(a.schema == b.schema)) throw TokenMismatch("annotations use different schemas");
  std::vector<int> la, lb;
  std::vector<std::vector<Tag>> tags_b;
  for (size_t i = 0; i < a.sentences.size(); ++i) {
    const Sentence &sa = a.sentences[i];
    const Sentence &sb = b.sentences[i];
    if (sa.surfaces() != sb.surfaces()) {
      throw TokenMismatch("sentence " + std::to_string(i) + " tokens differ");
    }
    for (int t = 0; t < sa.size(); ++t) {
      la.push_back(a.schema.LabelIndex(sa.tokens[t].tag));
      lb.push_back(a.schema.LabelIndex(sb.tokens[t].tag));
    }
    tags_b.push_back(sb.tags());
  }
  AgreementReport report;
  report.items = static_cast<int64_t>(la.size());
  report.cohen_kappa =
      CohensKappa(la, lb, a.schema.num_labels(), &report.observed, &report.expected);
  report.spans = EvaluateSerial(a, tags_b);
  return report;
}

std::string FormatAgreement(const AgreementReport &report, const LabelSchema &schema) {
  (void)schema;
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "cohen_kappa\t%.6f\nobserved\t%.6f\nexpected\t%.6f\nitems\t%lld\n",
                report.cohen_kappa, report.observed, report.expected,
                static_cast<long long>(report.items));
  out << buf << FormatReport(report.spans);
  return out.str();
}

}  // namespace csner
