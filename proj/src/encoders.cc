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

#include "csner/encoders.h"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "csner/corpus.h"
#include "csner/error.h"

namespace csner {

const char *WordEncoderName(WordEncoderKind kind) {
  switch (kind) {
    case WordEncoderKind::kCnn:
      return "cnn";
    case WordEncoderKind::kLstm:
      return "lstm";
    case WordEncoderKind::kBiLstm:
      return "bilstm";
  }
  return "bilstm";
}

WordEncoderKind ParseWordEncoder(std::string_view name) {
  if (name == "cnn") return WordEncoderKind::kCnn;
  if (name == "lstm") return WordEncoderKind::kLstm;
  if (name == "bilstm") return WordEncoderKind::kBiLstm;
  throw BadConfig("word encoder must be cnn, lstm or bilstm, got '" +
                  std::string(name) + "'");
}

std::string ArchitectureConfig::Name() const {
  static const char *kNames[] = {"CNN", "LSTM", "BiLSTM"};
  std::string name = "word ";
  name += kNames[static_cast<int>(word_encoder)];
  if (use_char_cnn) name += " + char CNN";
  return name + " + CRF";
}

void ArchitectureConfig::Validate() const {
  if (word_dim < 1 || hidden_dim < 1 || word_window < 1) {
    throw BadConfig("word_dim, hidden_dim and word_window must be positive");
  }
  if (use_char_cnn && (char_dim < 1 || char_filters < 1 || char_window < 1)) {
    throw BadConfig("char_dim, char_filters and char_window must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw BadConfig("dropout must lie in [0, 1)");
}

KeyValues ArchitectureConfig::ToKeyValues() const {
  return {{"word_encoder", WordEncoderName(word_encoder)},
          {"use_char_cnn", use_char_cnn ? "true" : "false"},
          {"word_dim", std::to_string(word_dim)},
          {"char_dim", std::to_string(char_dim)},
          {"char_filters", std::to_string(char_filters)},
          {"char_window", std::to_string(char_window)},
          {"word_window", std::to_string(word_window)},
          {"hidden_dim", std::to_string(hidden_dim)},
          {"dropout", FormatDouble(dropout)},
          {"embeddings", embeddings == EmbeddingSource::kTrained ? "trained" : "pretrained"}};
}

ArchitectureConfig ArchitectureConfig::FromKeyValues(const KeyValues &kv) {
  ArchitectureConfig c;
  std::string encoder = WordEncoderName(c.word_encoder);
  ReadString(kv, "word_encoder", encoder);
  c.word_encoder = ParseWordEncoder(encoder);
  ReadBool(kv, "use_char_cnn", c.use_char_cnn);
  ReadInt(kv, "word_dim", c.word_dim);
  ReadInt(kv, "char_dim", c.char_dim);
  ReadInt(kv, "char_filters", c.char_filters);
  ReadInt(kv, "char_window", c.char_window);
  ReadInt(kv, "word_window", c.word_window);
  ReadInt(kv, "hidden_dim", c.hidden_dim);
  ReadDouble(kv, "dropout", c.dropout);
  std::string source = "trained";
  ReadString(kv, "embeddings", source);
  if (source == "trained") {
    c.embeddings = EmbeddingSource::kTrained;
  } else if (source == "pretrained") {
    c.embeddings = EmbeddingSource::kPretrained;
  } else {
    throw BadConfig("embeddings must be trained or pretrained");
  }
  c.Validate();
  return c;
}

std::vector<ArchitectureConfig> ArchitectureConfig::AllSix(const ArchitectureConfig &base) {
  std::vector<ArchitectureConfig> out;
  for (bool chars : {false, true}) {
    for (WordEncoderKind k :
         {WordEncoderKind::kCnn, WordEncoderKind::kLstm, WordEncoderKind::kBiLstm}) {
      ArchitectureConfig c = base;
      c.word_encoder = k;
      c.use_char_cnn = chars;
      out.push_back(c);
    }
  }
  return out;
}

// --- Vocab -----------------------------------------------------------------

Vocab::Vocab() {
  Add(kPadToken);
  Add(kUnkToken);
}

int Vocab::Add(const std::string &item) {
  auto [it, inserted] = index_.emplace(item, size());
  if (inserted) items_.push_back(item);
  return it->second;
}

int Vocab::Lookup(const std::string &item) const {
  auto it = index_.find(item);
  return it == index_.end() ? kUnk : it->second;
}

void Vocab::Save(std::ostream &out) const {
  for (int i = 2; i < size(); ++i) out << items_[i] << '\n';
}

Vocab Vocab::Load(std::istream &in) {
  Vocab v;
  std::string line;
  while (std::getline(in, line)) v.Add(line);
  return v;
}

std::vector<std::string> SplitChars(std::string_view token) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < token.size()) {
    unsigned char lead = static_cast<unsigned char>(token[i]);
    size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    len = std::min(len, token.size() - i);
    out.emplace_back(token.substr(i, len));
    i += len;
  }
  return out;
}

Tensor XavierUniform(int fan_in, int fan_out, Rng &rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t(fan_in, fan_out);
  for (size_t i = 0; i < t.size(); ++i) t[i] = rng.Uniform(-a, a);
  return t;
}

// --- EmbeddingTable ----------------------------------------------------------

EmbeddingTable::EmbeddingTable(Vocab vocab, Parameter vectors, bool lowercase)
    : vocab_(std::move(vocab)), vectors_(std::move(vectors)), lowercase_(lowercase) {
  if (vectors_.value.rows() != vocab_.size()) {
    throw ShapeMismatch("embedding rows do not match vocabulary size");
  }
}

EmbeddingTable EmbeddingTable::Random(Vocab vocab, int dim, bool lowercase, Rng &rng,
                                      const std::string &name) {
  const double a = std::sqrt(3.0 / dim);
  Tensor t(vocab.size(), dim);
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < dim; ++c) t(r, c) = r == Vocab::kPad ? 0.0 : rng.Uniform(-a, a);
  }
  return EmbeddingTable(std::move(vocab), Parameter(name, std::move(t)), lowercase);
}

int EmbeddingTable::Lookup(const std::string &token) const {
  return vocab_.Lookup(lowercase_ ? CaseFold(token) : token);
}

std::span<const double> EmbeddingTable::Row(const std::string &token) const {
  return vectors_.value.row(Lookup(token));
}

Var EmbeddingTable::Embed(Tape &tape, std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto &t : tokens) ids.push_back(Lookup(t));
  return tape.Gather(vectors_, ids);
}

EmbeddingTable LoadPretrainedVectors(std::istream &in, int dim,
                                     std::span<const std::string> extra_tokens,
                                     bool lowercase, Rng &rng, const std::string &name) {
  if (dim < 1) throw DimMismatch("dimension must be positive");
  Vocab vocab;
  std::vector<double> rows(2 * static_cast<size_t>(dim), 0.0);
  const double a = 0.25 / std::sqrt(static_cast<double>(dim));
  for (int c = 0; c < dim; ++c) rows[dim + c] = rng.Uniform(-a, a);

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<std::string> values;
    for (std::string v; fields >> v;) values.push_back(v);
    if (lineno == 1 && values.size() == 1 && dim != 1) continue;  // "count dim" header
    if (static_cast<int>(values.size()) != dim) {
      throw DimMismatch("line " + std::to_string(lineno) + " has " +
                        std::to_string(values.size()) + " values, expected " +
                        std::to_string(dim));
    }
    if (lowercase) token = CaseFold(token);
    if (vocab.Contains(token)) continue;
    vocab.Add(token);
    for (const auto &v : values) {
      char *end = nullptr;
      double x = std::strtod(v.c_str(), &end);
      if (end != v.c_str() + v.size()) {
        throw DimMismatch("line " + std::to_string(lineno) + ": bad number '" + v + "'");
      }
      rows.push_back(x);
    }
  }
  for (const auto &raw : extra_tokens) {
    std::string token = lowercase ? CaseFold(raw) : raw;
    if (vocab.Contains(token)) continue;
    vocab.Add(token);
    for (int c = 0; c < dim; ++c) rows.push_back(rng.Uniform(-a, a));
  }
  const int n = vocab.size();
  return EmbeddingTable(std::move(vocab), Parameter(name, Tensor(n, dim, std::move(rows))),
                        lowercase);
}

// --- CharCnn -----------------------------------------------------------------

CharCnn::CharCnn(Vocab chars, int char_dim, int filters, int window, Rng &rng)
    : chars_(std::move(chars)), window_(window) {
  const double a = std::sqrt(3.0 / char_dim);
  Tensor emb(chars_.size(), char_dim);
  for (size_t i = 0; i < emb.size(); ++i) emb[i] = rng.Uniform(-a, a);
  embeddings_ = Parameter("char_cnn.embeddings", std::move(emb));
  filters_ = Parameter("char_cnn.filters", XavierUniform(window * char_dim, filters, rng));
  bias_ = Parameter("char_cnn.bias", Tensor(1, filters));
}

std::vector<int> CharCnn::CharIds(std::string_view token) const {
  std::vector<int> ids;
  for (const auto &c : SplitChars(token)) ids.push_back(chars_.Lookup(c));
  while (static_cast<int>(ids.size()) < window_) ids.push_back(Vocab::kPad);
  return ids;
}

Var CharCnn::Encode(Tape &tape, std::string_view token) const {
  Var chars = tape.Gather(embeddings_, CharIds(token));
  Var conv = AddRow(MatMul(Unfold(chars, window_), tape.Param(filters_)), tape.Param(bias_));
  return MaxOverAxis(conv, 0);
}

Var CharCnn::EncodeAll(Tape &tape, std::span<const std::string> tokens) const {
  // All tokens share one unfold and one product; windows that straddle two
  // tokens are computed but never pooled.
  std::vector<int> ids;
  std::vector<std::pair<int, int>> ranges;
  for (const auto &token : tokens) {
    std::vector<int> t = CharIds(token);
    const int begin = static_cast<int>(ids.size());
    ranges.emplace_back(begin, begin + static_cast<int>(t.size()) - window_ + 1);
    ids.insert(ids.end(), t.begin(), t.end());
  }
  Var chars = tape.Gather(embeddings_, ids);
  Var conv = AddRow(MatMul(Unfold(chars, window_), tape.Param(filters_)), tape.Param(bias_));
  std::vector<Var> pooled;
  pooled.reserve(ranges.size());
  for (const auto &[b, e] : ranges) pooled.push_back(MaxOverAxis(SliceRows(conv, b, e), 0));
  return Concat(pooled, 0);
}

// --- Lstm --------------------------------------------------------------------

Lstm::Lstm(const std::string &name, int input_dim, int hidden_dim, Rng &rng)
    : hidden_(hidden_dim) {
  input_weights_ = Parameter(name + ".input_weights", XavierUniform(input_dim, 4 * hidden_dim, rng));
  recurrent_weights_ =
      Parameter(name + ".recurrent_weights", XavierUniform(hidden_dim, 4 * hidden_dim, rng));
  Tensor bias(1, 4 * hidden_dim);
  for (int j = hidden_dim; j < 2 * hidden_dim; ++j) bias(0, j) = 1.0;
  bias_ = Parameter(name + ".bias", std::move(bias));
}

std::vector<Var> Lstm::Run(Tape &tape, Var inputs, bool reverse) const {
  const int T = inputs.rows();
  const int H = hidden_;
  Var projected = AddRow(MatMul(inputs, tape.Param(input_weights_)), tape.Param(bias_));
  Var recurrent = tape.Param(recurrent_weights_);
  std::vector<Var> states(T);
  Var h, c;
  for (int step = 0; step < T; ++step) {
    const int t = reverse ? T - 1 - step : step;
    Var pre = SliceRows(projected, t, t + 1);
    if (step > 0) pre = Add(pre, MatMul(h, recurrent));
    Var in_gate = Sigmoid(SliceCols(pre, 0, H));
    Var cell = Tanh(SliceCols(pre, 2 * H, 3 * H));
    Var out_gate = Sigmoid(SliceCols(pre, 3 * H, 4 * H));
    Var update = Mul(in_gate, cell);
    if (step > 0) {
      Var forget = Sigmoid(SliceCols(pre, H, 2 * H));
      c = Add(Mul(forget, c), update);
    } else {
      c = update;
    }
    h = Mul(out_gate, Tanh(c));
    states[t] = h;
  }
  return states;
}

// --- WordEncoder -------------------------------------------------------------

WordEncoder::WordEncoder(WordEncoderKind kind, int input_dim, int hidden_dim, int window,
                         Rng &rng)
    : kind_(kind), window_(window), hidden_(hidden_dim) {
  switch (kind) {
    case WordEncoderKind::kCnn:
      conv_weights_ = Parameter("encoder.cnn.weights",
                                XavierUniform(window * input_dim, hidden_dim, rng));
      conv_bias_ = Parameter("encoder.cnn.bias", Tensor(1, hidden_dim));
      break;
    case WordEncoderKind::kLstm:
      forward_ = Lstm("encoder.lstm", input_dim, hidden_dim, rng);
      break;
    case WordEncoderKind::kBiLstm:
      forward_ = Lstm("encoder.lstm_forward", input_dim, hidden_dim, rng);
      backward_ = Lstm("encoder.lstm_backward", input_dim, hidden_dim, rng);
      break;
  }
}

int WordEncoder::output_dim() const {
  return kind_ == WordEncoderKind::kBiLstm ? 2 * hidden_ : hidden_;
}

Var WordEncoder::Forward(Tape &tape, Var inputs) const {
  switch (kind_) {
    case WordEncoderKind::kCnn: {
      const int before = (window_ - 1) / 2;
      const int after = window_ - 1 - before;
      std::vector<Var> rows;
      if (before > 0) rows.push_back(tape.Constant(Tensor(before, inputs.cols())));
      rows.push_back(inputs);
      if (after > 0) rows.push_back(tape.Constant(Tensor(after, inputs.cols())));
      Var padded = rows.size() == 1 ? inputs : Concat(rows, 0);
      Var conv = MatMul(Unfold(padded, window_), tape.Param(conv_weights_));
      return Tanh(AddRow(conv, tape.Param(conv_bias_)));
    }
    case WordEncoderKind::kLstm:
      return Concat(forward_.Run(tape, inputs, false), 0);
    case WordEncoderKind::kBiLstm: {
      Var fwd = Concat(forward_.Run(tape, inputs, false), 0);
      Var bwd = Concat(backward_.Run(tape, inputs, true), 0);
      Var both[] = {fwd, bwd};
      return Concat(both, 1);
    }
  }
  return inputs;
}

std::vector<Parameter *> WordEncoder::parameters() {
  switch (kind_) {
    case WordEncoderKind::kCnn:
      return {&conv_weights_, &conv_bias_};
    case WordEncoderKind::kLstm:
      return forward_.parameters();
    case WordEncoderKind::kBiLstm: {
      auto out = forward_.parameters();
      for (Parameter *p : backward_.parameters()) out.push_back(p);
      return out;
    }
  }
  return {};
}

std::vector<const Parameter *> WordEncoder::parameters() const {
  switch (kind_) {
    case WordEncoderKind::kCnn:
      return {&conv_weights_, &conv_bias_};
    case WordEncoderKind::kLstm:
      return forward_.parameters();
    case WordEncoderKind::kBiLstm: {
      auto out = forward_.parameters();
      for (const Parameter *p : backward_.parameters()) out.push_back(p);
      return out;
    }
  }
  return {};
}

// --- Projection --------------------------------------------------------------

Projection::Projection(int input_dim, int num_labels, Rng &rng)
    : weights_("projection.weights", XavierUniform(input_dim, num_labels, rng)),
      bias_("projection.bias", Tensor(1, num_labels)) {}

Var Projection::Forward(Tape &tape, Var hidden) const {
  return AddRow(MatMul(hidden, tape.Param(weights_)), tape.Param(bias_));
}

}  // namespace csner
