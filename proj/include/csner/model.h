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

#ifndef CSNER_MODEL_H_
#define CSNER_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "csner/autodiff.h"
#include "csner/corpus.h"
#include "csner/crf.h"
#include "csner/encoders.h"
#include "csner/schema.h"

namespace csner {

// Word embeddings (+ optional char CNN) -> word encoder -> projection -> CRF.
//
// Inference methods are const and use only per-call tapes, so one model may
// tag from several threads at once. Training mutates parameters and must
// not overlap with tagging.
class TaggerModel {
 public:
  // Fresh parameters. `words` and `chars` are the vocabularies used for
  // trained-on-data embeddings and the char CNN.
  TaggerModel(LabelSchema schema, ArchitectureConfig config, Vocab words, Vocab chars,
              uint64_t seed);

  // Same, with a word table loaded from a pretrained-vector file.
  TaggerModel(LabelSchema schema, ArchitectureConfig config, EmbeddingTable words,
              Vocab chars, uint64_t seed);

  // Builds vocabularies from `train` and initializes. For pretrained
  // embeddings `pretrained` must point at the vector file.
  static TaggerModel Create(const ArchitectureConfig &config, const Corpus &train,
                            uint64_t seed, std::istream *pretrained = nullptr);

  const LabelSchema &schema() const { return schema_; }
  const ArchitectureConfig &config() const { return config_; }
  const EmbeddingTable &word_table() const { return words_; }
  const CharCnn &char_cnn() const { return char_cnn_; }
  const Vocab &char_vocab() const { return char_cnn_.chars(); }
  const CrfParams &crf() const { return crf_; }
  int num_labels() const { return schema_.num_labels(); }

  // T x L emission scores. Dropout is active only when `train` is set, in
  // which case `rng` must be non-null.
  Var Emissions(Tape &tape, std::span<const std::string> tokens, bool train,
                Rng *rng) const;

  // CRF negative log-likelihood of the sentence's gold tags.
  Var Loss(Tape &tape, const Sentence &sentence, bool train, Rng *rng) const;

  // Constrained Viterbi decode in eval mode.
  std::vector<Tag> Predict(std::span<const std::string> tokens) const;

  // One prediction per token sequence, sentences spread over OpenMP threads.
  std::vector<std::vector<Tag>> PredictBatch(
      std::span<const std::vector<std::string>> sentences) const;
  // Sequential reference for PredictBatch.
  std::vector<std::vector<Tag>> PredictBatchSerial(
      std::span<const std::vector<std::string>> sentences) const;

  std::vector<Parameter *> parameters();
  std::vector<const Parameter *> parameters() const;
  // nullptr when no parameter has this name.
  Parameter *FindParameter(const std::string &name);

 private:
  LabelSchema schema_;
  ArchitectureConfig config_;
  EmbeddingTable words_;
  CharCnn char_cnn_;
  WordEncoder encoder_;
  Projection projection_;
  CrfParams crf_;
  Tensor bio_mask_;
};

// Tokens and chars seen in a corpus, in first-seen order.
Vocab BuildWordVocab(const Corpus &corpus, bool lowercase);
Vocab BuildCharVocab(const Corpus &corpus);

}  // namespace csner

#endif  // CSNER_MODEL_H_
