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

#include "csner/model.h"

#include <istream>

#include "csner/error.h"

namespace csner {

Vocab BuildWordVocab(const Corpus &corpus, bool lowercase) {
  Vocab v;
  for (const auto &s : corpus.sentences) {
    for (const auto &t : s.tokens) v.Add(lowercase ? CaseFold(t.surface) : t.surface);
  }
  return v;
}

Vocab BuildCharVocab(const Corpus &corpus) {
  Vocab v;
  for (const auto &s : corpus.sentences) {
    for (const auto &t : s.tokens) {
      for (const auto &c : SplitChars(t.surface)) v.Add(c);
    }
  }
  return v;
}

TaggerModel::TaggerModel(LabelSchema schema, ArchitectureConfig config, Vocab words,
                         Vocab chars, uint64_t seed)
    : schema_(std::move(schema)), config_(config) {
  config_.Validate();
  Rng rng(seed);
  words_ = EmbeddingTable::Random(std::move(words), config_.word_dim, config_.lowercase(), rng,
                                  "word_embeddings");
  if (config_.use_char_cnn) {
    char_cnn_ = CharCnn(std::move(chars), config_.char_dim, config_.char_filters,
                        config_.char_window, rng);
  }
  encoder_ = WordEncoder(config_.word_encoder, config_.token_dim(), config_.hidden_dim,
                         config_.word_window, rng);
  projection_ = Projection(encoder_.output_dim(), schema_.num_labels(), rng);
  crf_ = CrfParams(schema_.num_labels());
  bio_mask_ = BioTransitionMask(schema_);
}

TaggerModel::TaggerModel(LabelSchema schema, ArchitectureConfig config, EmbeddingTable words,
                         Vocab chars, uint64_t seed)
    : schema_(std::move(schema)), config_(config), words_(std::move(words)) {
  config_.Validate();
  if (words_.dim() != config_.word_dim) {
    throw DimMismatch("embedding table has dimension " + std::to_string(words_.dim()) +
                      ", config expects " + std::to_string(config_.word_dim));
  }
  Rng rng(seed);
  if (config_.use_char_cnn) {
    char_cnn_ = CharCnn(std::move(chars), config_.char_dim, config_.char_filters,
                        config_.char_window, rng);
  }
  encoder_ = WordEncoder(config_.word_encoder, config_.token_dim(), config_.hidden_dim,
                         config_.word_window, rng);
  projection_ = Projection(encoder_.output_dim(), schema_.num_labels(), rng);
  crf_ = CrfParams(schema_.num_labels());
  bio_mask_ = BioTransitionMask(schema_);
}

TaggerModel TaggerModel::Create(const ArchitectureConfig &config, const Corpus &train,
                                uint64_t seed, std::istream *pretrained) {
  Vocab chars = BuildCharVocab(train);
  if (config.embeddings == EmbeddingSource::kTrained) {
    return TaggerModel(train.schema, config, BuildWordVocab(train, config.lowercase()),
                       std::move(chars), seed);
  }
  if (pretrained == nullptr) throw BadConfig("pretrained embeddings need a vector file");
  Vocab corpus_words = BuildWordVocab(train, config.lowercase());
  std::vector<std::string> extra(corpus_words.items().begin() + 2, corpus_words.items().end());
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  EmbeddingTable table =
      LoadPretrainedVectors(*pretrained, config.word_dim, extra, config.lowercase(), rng);
  return TaggerModel(train.schema, config, std::move(table), std::move(chars), seed);
}

Var TaggerModel::Emissions(Tape &tape, std::span<const std::string> tokens, bool train,
                           Rng *rng) const {
  if (tokens.empty()) throw LengthMismatch("cannot tag an empty sentence");
  if (train && rng == nullptr) throw BadConfig("training mode needs a random generator");
  Var reps = words_.Embed(tape, tokens);
  if (config_.use_char_cnn) {
    Var parts[] = {reps, char_cnn_.EncodeAll(tape, tokens)};
    reps = Concat(parts, 1);
  }
  Rng unused(0);
  Rng &r = rng != nullptr ? *rng : unused;
  reps = Dropout(reps, config_.dropout, train, r);
  Var hidden = Dropout(encoder_.Forward(tape, reps), config_.dropout, train, r);
  return projection_.Forward(tape, hidden);
}

Var TaggerModel::Loss(Tape &tape, const Sentence &sentence, bool train, Rng *rng) const {
  std::vector<std::string> tokens = sentence.surfaces();
  std::vector<int> gold;
  gold.reserve(tokens.size());
  for (const auto &t : sentence.tokens) gold.push_back(schema_.LabelIndex(t.tag));
  Var em = Emissions(tape, tokens, train, rng);
  return Nll(em, gold, tape.Param(crf_.transitions));
}

std::vector<Tag> TaggerModel::Predict(std::span<const std::string> tokens) const {
  if (tokens.empty()) return {};
  Tape tape;
  Var em = Emissions(tape, tokens, false, nullptr);
  ViterbiResult best = Viterbi(em.value(), crf_.transitions.value, &bio_mask_);
  std::vector<Tag> tags;
  tags.reserve(best.tags.size());
  for (int y : best.tags) tags.push_back(schema_.LabelTag(y));
  return tags;
}

std::vector<std::vector<Tag>> TaggerModel::PredictBatch(
    std::span<const std::vector<std::string>> sentences) const {
  std::vector<std::vector<Tag>> out(sentences.size());
  const int64_t n = static_cast<int64_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (int64_t i = 0; i < n; ++i) out[i] = Predict(sentences[i]);
  return out;
}

std::vector<std::vector<Tag>> TaggerModel::PredictBatchSerial(
    std::span<const std::vector<std::string>> sentences) const {
  std::vector<std::vector<Tag>> out;
  out.reserve(sentences.size());
  for (const auto &s : sentences) out.push_back(Predict(s));
  return out;
}

std::vector<Parameter *> TaggerModel::parameters() {
  std::vector<Parameter *> out{&words_.vectors()};
  if (config_.use_char_cnn) {
    for (Parameter *p : char_cnn_.parameters()) out.push_back(p);
  }
  for (Parameter *p : encoder_.parameters()) out.push_back(p);
  for (Parameter *p : projection_.parameters()) out.push_back(p);
  out.push_back(&crf_.transitions);
  return out;
}

std::vector<const Parameter *> TaggerModel::parameters() const {
  std::vector<const Parameter *> out{&words_.vectors()};
  if (config_.use_char_cnn) {
    for (const Parameter *p : char_cnn_.parameters()) out.push_back(p);
  }
  for (const Parameter *p : encoder_.parameters()) out.push_back(p);
  for (const Parameter *p : projection_.parameters()) out.push_back(p);
  out.push_back(&crf_.transitions);
  return out;
}

Parameter *TaggerModel::FindParameter(const std::string &name) {
  for (Parameter *p : parameters()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

}  // namespace csner
