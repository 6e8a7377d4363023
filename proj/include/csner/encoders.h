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

#ifndef CSNER_ENCODERS_H_
#define CSNER_ENCODERS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csner/autodiff.h"
#include "csner/config.h"
#include "csner/random.h"

namespace csner {

enum class WordEncoderKind { kCnn, kLstm, kBiLstm };
enum class EmbeddingSource { kTrained, kPretrained };

const char *WordEncoderName(WordEncoderKind kind);
WordEncoderKind ParseWordEncoder(std::string_view name);

// One of the six word {CNN, LSTM, BiLSTM} x {with, without char CNN} + CRF
// taggers, plus the sizes that go with it.
struct ArchitectureConfig {
  WordEncoderKind word_encoder = WordEncoderKind::kBiLstm;
  bool use_char_cnn = true;
  int word_dim = 50;
  int char_dim = 16;
  int char_filters = 30;
  int char_window = 3;
  int word_window = 3;
  // Per-direction LSTM size; also the CNN channel count.
  int hidden_dim = 100;
  double dropout = 0.5;
  EmbeddingSource embeddings = EmbeddingSource::kTrained;

  // Pretrained vocabularies are lower-case.
  bool lowercase() const { return embeddings == EmbeddingSource::kPretrained; }
  // Width of the encoder output.
  int encoder_output_dim() const {
    return word_encoder == WordEncoderKind::kBiLstm ? 2 * hidden_dim : hidden_dim;
  }
  // Width of the per-token input to the word encoder.
  int token_dim() const { return word_dim + (use_char_cnn ? char_filters : 0); }

  // e.g. "word BiLSTM + char CNN + CRF"
  std::string Name() const;
  // Throws BadConfig on non-positive sizes or a dropout outside [0, 1).
  void Validate() const;

  KeyValues ToKeyValues() const;
  static ArchitectureConfig FromKeyValues(const KeyValues &kv);

  // The six variants in the order word CNN, LSTM, BiLSTM without char CNN,
  // then the same three with it, sharing every size of `base`.
  static std::vector<ArchitectureConfig> AllSix(const ArchitectureConfig &base);

  friend bool operator==(const ArchitectureConfig &, const ArchitectureConfig &) = default;
};

// String-to-index map with reserved padding (0) and unknown (1) entries.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr const char *kPadToken = "<pad>";
  static constexpr const char *kUnkToken = "<unk>";

  Vocab();
  // Index of `item`, adding it when new.
  int Add(const std::string &item);
  // Index of `item`, or kUnk.
  int Lookup(const std::string &item) const;
  bool Contains(const std::string &item) const { return index_.count(item) > 0; }

  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<std::string> &items() const { return items_; }

  // One entry per line, in index order, starting after the reserved pair.
  void Save(std::ostream &out) const;
  static Vocab Load(std::istream &in);

  friend bool operator==(const Vocab &a, const Vocab &b) { return a.items_ == b.items_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, int> index_;
};

// UTF-8 aware split of a token into characters (one code point each).
std::vector<std::string> SplitChars(std::string_view token);

// Xavier/Glorot uniform: U(-a, a), a = sqrt(6 / (fan_in + fan_out)).
Tensor XavierUniform(int fan_in, int fan_out, Rng &rng);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Vocab vocab, Parameter vectors, bool lowercase);

  // Rows for every vocabulary entry, uniform in +-sqrt(3 / dim); the padding
  // row is zero.
  static EmbeddingTable Random(Vocab vocab, int dim, bool lowercase, Rng &rng,
                               const std::string &name);

  const Vocab &vocab() const { return vocab_; }
  const Parameter &vectors() const { return vectors_; }
  Parameter &vectors() { return vectors_; }
  bool lowercase() const { return lowercase_; }
  int dim() const { return vectors_.value.cols(); }

  int Lookup(const std::string &token) const;
  std::span<const double> Row(const std::string &token) const;

  // T x D matrix of token vectors.
  Var Embed(Tape &tape, std::span<const std::string> tokens) const;

 private:
  Vocab vocab_;
  Parameter vectors_;
  bool lowercase_ = false;
};

// Reads "token f1 ... f_dim" lines (a leading "count dim" header is
// skipped). File tokens keep their vectors, case-folded with `lowercase`
// (the first of several folding alike wins); `extra_tokens` not found in the
// file, and the unknown row, get uniform +-0.25/sqrt(dim) rows. Throws
// DimMismatch for a line with the wrong number of values.
EmbeddingTable LoadPretrainedVectors(std::istream &in, int dim,
                                     std::span<const std::string> extra_tokens,
                                     bool lowercase, Rng &rng,
                                     const std::string &name = "word_embeddings");

// Convolution over character embeddings followed by max-over-time pooling.
class CharCnn {
 public:
  CharCnn() = default;
  CharCnn(Vocab chars, int char_dim, int filters, int window, Rng &rng);

  const Vocab &chars() const { return chars_; }
  int filters() const { return filters_.value.cols(); }
  int window() const { return window_; }

  // 1 x F vector for one token.
  Var Encode(Tape &tape, std::string_view token) const;
  // T x F matrix, one row per token.
  Var EncodeAll(Tape &tape, std::span<const std::string> tokens) const;

  std::vector<Parameter *> parameters() { return {&embeddings_, &filters_, &bias_}; }
  std::vector<const Parameter *> parameters() const { return {&embeddings_, &filters_, &bias_}; }

 private:
  // Character ids padded on the right to at least `window_`.
  std::vector<int> CharIds(std::string_view token) const;

  Vocab chars_;
  Parameter embeddings_;
  Parameter filters_;  // (window * char_dim) x F
  Parameter bias_;     // 1 x F
  int window_ = 3;
};

// Standard LSTM, gate order (input, forget, cell, output) along columns.
class Lstm {
 public:
  Lstm() = default;
  Lstm(const std::string &name, int input_dim, int hidden_dim, Rng &rng);

  int hidden_dim() const { return hidden_; }

  // Hidden states for each position. With `reverse` the sequence is read
  // right to left and states[t] belongs to position t.
  std::vector<Var> Run(Tape &tape, Var inputs, bool reverse) const;

  std::vector<Parameter *> parameters() { return {&input_weights_, &recurrent_weights_, &bias_}; }
  std::vector<const Parameter *> parameters() const {
    return {&input_weights_, &recurrent_weights_, &bias_};
  }

 private:
  Parameter input_weights_;      // input_dim x 4H
  Parameter recurrent_weights_;  // H x 4H
  Parameter bias_;               // 1 x 4H, forget slice starts at 1
  int hidden_ = 0;
};

// Word-level contextual encoder: T x D' -> T x H.
class WordEncoder {
 public:
  WordEncoder() = default;
  WordEncoder(WordEncoderKind kind, int input_dim, int hidden_dim, int window, Rng &rng);

  WordEncoderKind kind() const { return kind_; }
  int output_dim() const;

  // cnn: same-padded convolution with tanh; lstm: left-to-right states;
  // bilstm: forward states joined with right-to-left states.
  Var Forward(Tape &tape, Var inputs) const;

  // Direct access for tests that pin weights.
  Lstm &forward_lstm() { return forward_; }
  Lstm &backward_lstm() { return backward_; }

  std::vector<Parameter *> parameters();
  std::vector<const Parameter *> parameters() const;

 private:
  WordEncoderKind kind_ = WordEncoderKind::kBiLstm;
  Parameter conv_weights_;  // (window * input_dim) x H
  Parameter conv_bias_;
  int window_ = 3;
  int hidden_ = 0;
  Lstm forward_;
  Lstm backward_;
};

// Affine map from encoder states to per-label emission scores.
class Projection {
 public:
  Projection() = default;
  Projection(int input_dim, int num_labels, Rng &rng);

  Var Forward(Tape &tape, Var hidden) const;

  std::vector<Parameter *> parameters() { return {&weights_, &bias_}; }
  std::vector<const Parameter *> parameters() const { return {&weights_, &bias_}; }

 private:
  Parameter weights_;  // H x L
  Parameter bias_;     // 1 x L
};

}  // namespace csner

#endif  // CSNER_ENCODERS_H_
