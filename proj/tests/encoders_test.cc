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

#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

#include "common/oracles.h"
#include "csner/encoders.h"
#include "csner/error.h"

namespace csner {
namespace {

double Sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST_CASE("vocab reserves padding and unknown") {
  Vocab v;
  CHECK(v.size() == 2);
  CHECK(v.Lookup("x") == Vocab::kUnk);
  CHECK(v.Add("x") == 2);
  CHECK(v.Add("x") == 2);
  CHECK(v.Lookup("x") == 2);
  v.Add("y");
  std::stringstream s;
  v.Save(s);
  CHECK(s.str() == "x\ny\n");
  CHECK(Vocab::Load(s) == v);
}

TEST_CASE("split chars keeps UTF-8 code points whole") {
  CHECK(SplitChars("ab") == std::vector<std::string>{"a", "b"});
  CHECK(SplitChars("Zürich") == std::vector<std::string>{"Z", "ü", "r", "i", "c", "h"});
  CHECK(SplitChars("").empty());
}

TEST_CASE("xavier bounds") {
  Rng rng(1);
  Tensor w = XavierUniform(30, 20, rng);
  const double a = std::sqrt(6.0 / 50.0);
  for (double x : w.values()) CHECK(std::abs(x) <= a);
}

TEST_CASE("trained embedding table") {
  Vocab v;
  v.Add("Parsing");
  v.Add("with");
  Rng rng(2);
  EmbeddingTable table = EmbeddingTable::Random(v, 6, false, rng, "words");
  CHECK(table.vectors().value.rows() == 4);
  for (double x : table.vectors().value.row(Vocab::kPad)) CHECK(x == 0.0);
  for (double x : table.vectors().value.values()) CHECK(std::abs(x) <= std::sqrt(3.0 / 6.0));
  CHECK(table.Lookup("Parsing") == 2);
  CHECK(table.Lookup("parsing") == Vocab::kUnk);

  Tape tape;
  std::vector<std::string> tokens{"with", "Parsing", "with", "zzz"};
  Var e = table.Embed(tape, tokens);
  CHECK(e.rows() == 4);
  CHECK(e.cols() == 6);
  for (int c = 0; c < 6; ++c) {
    CHECK(e.value()(0, c) == e.value()(2, c));
    CHECK(e.value()(1, c) == table.vectors().value(2, c));
    CHECK(e.value()(3, c) == table.vectors().value(Vocab::kUnk, c));
  }
}

TEST_CASE("pretrained vectors") {
  const char *file = "a 1 2 3 4\nB 5 6 7 8\nc 0.5 0.25 0 -1\n";
  std::vector<std::string> extra{"d", "a"};
  SUBCASE("counts and exact rows") {
    std::istringstream in(file);
    Rng rng(3);
    EmbeddingTable t = LoadPretrainedVectors(in, 4, {}, true, rng);
    CHECK(t.vocab().size() == 3 + 2);
    CHECK(t.dim() == 4);
    auto row = t.Row("A");
    CHECK(std::vector<double>(row.begin(), row.end()) == std::vector<double>{1, 2, 3, 4});
    auto b = t.Row("b");
    CHECK(std::vector<double>(b.begin(), b.end()) == std::vector<double>{5, 6, 7, 8});
  }
  SUBCASE("header line is skipped") {
    std::istringstream in(std::string("3 4\n") + file);
    Rng rng(3);
    CHECK(LoadPretrainedVectors(in, 4, {}, true, rng).vocab().size() == 5);
  }
  SUBCASE("extra tokens and unknown rows are small and seeded") {
    std::istringstream in1(file), in2(file);
    Rng r1(4), r2(4);
    EmbeddingTable t1 = LoadPretrainedVectors(in1, 4, extra, true, r1);
    EmbeddingTable t2 = LoadPretrainedVectors(in2, 4, extra, true, r2);
    CHECK(t1.vocab().size() == 6);
    CHECK(t1.vectors().value == t2.vectors().value);
    const double bound = 0.25 / std::sqrt(4.0);
    for (const char *tok : {"d", "never-seen"}) {
      for (double x : t1.Row(tok)) CHECK(std::abs(x) <= bound);
    }
    auto unseen = t1.Row("never-seen");
    auto unk = t1.vectors().value.row(Vocab::kUnk);
    CHECK(std::equal(unseen.begin(), unseen.end(), unk.begin()));
    for (double x : t1.vectors().value.row(Vocab::kPad)) CHECK(x == 0.0);
  }
  SUBCASE("wrong width") {
    std::istringstream in("a 1 2 3\n");
    Rng rng(1);
    CHECK_THROWS_AS(LoadPretrainedVectors(in, 4, {}, true, rng), DimMismatch);
  }
}

CharCnn HandCnn() {
  Vocab chars;
  chars.Add("a");
  chars.Add("b");
  Rng rng(1);
  CharCnn cnn(chars, 2, 1, 2, rng);
  auto params = cnn.parameters();
  params[0]->value = Tensor::FromRows({{0, 0}, {0, 0}, {1, 2}, {3, 4}});
  params[1]->value = Tensor::FromRows({{0.5}, {-1}, {2}, {0.25}});
  params[2]->value = Tensor::FromRows({{0.1}});
  return cnn;
}

TEST_CASE("char CNN by hand") {
  CharCnn cnn = HandCnn();
  Tape tape;
  // Window [a, b] = [1, 2, 3, 4]: 0.5 - 2 + 6 + 1 + 0.1.
  CHECK(cnn.Encode(tape, "ab").scalar() == doctest::Approx(5.6));
  // Windows [b, a] = 1.5 - 4 + 2 + 0.5 + 0.1 = 0.1 and [a, b] = 5.6.
  CHECK(cnn.Encode(tape, "bab").scalar() == doctest::Approx(5.6));
  // "a" padded with the zero row: 0.5 - 2 + 0.1.
  CHECK(cnn.Encode(tape, "a").scalar() == doctest::Approx(-1.4));
}

TEST_CASE("char CNN shapes and pooling") {
  Vocab chars;
  for (const char *c : {"a", "b", "x"}) chars.Add(c);
  Rng rng(5);
  CharCnn cnn(chars, 4, 7, 3, rng);
  Tape tape;
  for (const char *token : {"a", "ab", "abxabxabx", "?"}) CHECK(cnn.Encode(tape, token).cols() == 7);
  CHECK(cnn.Encode(tape, "xxx").value() == cnn.Encode(tape, "xxxxxxx").value());
  std::vector<std::string> tokens{"ab", "x", "abxab", "a"};
  Var all = cnn.EncodeAll(tape, tokens);
  REQUIRE(all.rows() == 4);
  for (int i = 0; i < 4; ++i) {
    Tensor one = cnn.Encode(tape, tokens[i]).value();
    for (int c = 0; c < 7; ++c) CHECK(all.value()(i, c) == doctest::Approx(one(0, c)).epsilon(1e-14));
  }
}

TEST_CASE("LSTM with zero weights stays at zero") {
  Rng rng(1);
  Lstm lstm("l", 3, 4, rng);
  for (Parameter *p : lstm.parameters()) p->value.Fill(0.0);
  Tape tape;
  Var x = tape.Constant(oracle::RandomTensor(5, 3, rng));
  for (Var h : lstm.Run(tape, x, false)) {
    for (double v : h.value().values()) CHECK(v == 0.0);
  }
}

TEST_CASE("LSTM forget bias starts at one") {
  Rng rng(1);
  Lstm lstm("l", 3, 4, rng);
  const Tensor &b = lstm.parameters()[2]->value;
  for (int j = 0; j < 16; ++j) CHECK(b(0, j) == (j >= 4 && j < 8 ? 1.0 : 0.0));
}

TEST_CASE("LSTM steps match the gate equations by hand") {
  Rng rng(1);
  Lstm lstm("l", 1, 1, rng);
  auto p = lstm.parameters();
  p[0]->value = Tensor::FromRows({{0.5, -0.3, 0.8, 1.2}});  // W_x for i, f, g, o
  p[1]->value = Tensor::FromRows({{0.2, 0.4, -0.6, 0.1}});  // W_h
  p[2]->value = Tensor::FromRows({{0.1, 1.0, -0.2, 0.0}});
  Tape tape;
  Var x = tape.Constant(Tensor::FromRows({{2.0}, {-1.0}}));
  auto states = lstm.Run(tape, x, false);
  const double i1 = Sig(0.5 * 2 + 0.1), g1 = std::tanh(0.8 * 2 - 0.2), o1 = Sig(1.2 * 2);
  const double c1 = i1 * g1, h1 = o1 * std::tanh(c1);
  CHECK(states[0].scalar() == doctest::Approx(h1).epsilon(1e-14));
  const double i2 = Sig(-0.5 + 0.2 * h1 + 0.1), f2 = Sig(0.3 + 0.4 * h1 + 1.0);
  const double g2 = std::tanh(-0.8 - 0.6 * h1 - 0.2), o2 = Sig(-1.2 + 0.1 * h1);
  const double c2 = f2 * c1 + i2 * g2;
  CHECK(states[1].scalar() == doctest::Approx(o2 * std::tanh(c2)).epsilon(1e-14));
}

TEST_CASE("BiLSTM with tied directions is position-symmetric on a palindrome") {
  Rng rng(6);
  WordEncoder enc(WordEncoderKind::kBiLstm, 3, 4, 3, rng);
  auto fwd = enc.forward_lstm().parameters();
  auto bwd = enc.backward_lstm().parameters();
  for (size_t i = 0; i < fwd.size(); ++i) bwd[i]->value = fwd[i]->value;
  Tensor a = oracle::RandomTensor(1, 3, rng), b = oracle::RandomTensor(1, 3, rng);
  Tensor seq(5, 3);
  for (int c = 0; c < 3; ++c) {
    seq(0, c) = seq(4, c) = a(0, c);
    seq(1, c) = seq(3, c) = b(0, c);
    seq(2, c) = a(0, c) + b(0, c);
  }
  Tape tape;
  Var out = enc.Forward(tape, tape.Constant(seq));
  REQUIRE(out.cols() == 8);
  for (int t = 0; t < 5; ++t) {
    for (int j = 0; j < 4; ++j) CHECK(out.value()(t, j) == doctest::Approx(out.value()(4 - t, 4 + j)));
  }
}

TEST_CASE("word encoder output shapes") {
  Rng rng(7);
  Tape tape;
  Var x = tape.Constant(oracle::RandomTensor(6, 5, rng));
  CHECK(WordEncoder(WordEncoderKind::kCnn, 5, 4, 3, rng).Forward(tape, x).cols() == 4);
  CHECK(WordEncoder(WordEncoderKind::kLstm, 5, 4, 3, rng).Forward(tape, x).cols() == 4);
  CHECK(WordEncoder(WordEncoderKind::kBiLstm, 5, 4, 3, rng).Forward(tape, x).cols() == 8);
  for (int window : {1, 2, 3, 5}) {
    Var y = WordEncoder(WordEncoderKind::kCnn, 5, 4, window, rng).Forward(tape, x);
    CHECK(y.rows() == 6);
  }
  Var one = tape.Constant(oracle::RandomTensor(1, 5, rng));
  CHECK(WordEncoder(WordEncoderKind::kCnn, 5, 4, 3, rng).Forward(tape, one).rows() == 1);
}

TEST_CASE("projection is affine") {
  Rng rng(8);
  Projection proj(4, 3, rng);
  Tape tape;
  Tensor a = oracle::RandomTensor(2, 4, rng), b = oracle::RandomTensor(2, 4, rng);
  Tensor sum = a;
  sum.Accumulate(b);
  Tensor pa = proj.Forward(tape, tape.Constant(a)).value();
  Tensor pb = proj.Forward(tape, tape.Constant(b)).value();
  Tensor ps = proj.Forward(tape, tape.Constant(sum)).value();
  const Tensor &bias = proj.parameters()[1]->value;
  CHECK(ps.rows() == 2);
  CHECK(ps.cols() == 3);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(ps(r, c) == doctest::Approx(pa(r, c) + pb(r, c) - bias(0, c)));
  }
  proj.parameters()[0]->value.Fill(0.0);
  proj.parameters()[1]->value = Tensor::FromRows({{1, 2, 3}});
  Tensor z = proj.Forward(tape, tape.Constant(a)).value();
  CHECK(z == Tensor::FromRows({{1, 2, 3}, {1, 2, 3}}));
  CHECK_THROWS_AS(proj.Forward(tape, tape.Constant(Tensor(2, 5))), ShapeMismatch);
}

TEST_CASE("architecture configs") {
  ArchitectureConfig base;
  auto six = ArchitectureConfig::AllSix(base);
  REQUIRE(six.size() == 6);
  std::vector<std::string> names;
  for (const auto &c : six) names.push_back(c.Name());
  CHECK(names == std::vector<std::string>{
                     "word CNN + CRF", "word LSTM + CRF", "word BiLSTM + CRF",
                     "word CNN + char CNN + CRF", "word LSTM + char CNN + CRF",
                     "word BiLSTM + char CNN + CRF"});
  CHECK(std::set<std::string>(names.begin(), names.end()).size() == 6);
  for (const auto &c : six) CHECK(ArchitectureConfig::FromKeyValues(c.ToKeyValues()) == c);
  ArchitectureConfig bad;
  bad.dropout = 1.0;
  CHECK_THROWS_AS(bad.Validate(), BadConfig);
  bad = ArchitectureConfig();
  bad.hidden_dim = 0;
  CHECK_THROWS_AS(bad.Validate(), BadConfig);
  CHECK_THROWS_AS(ParseWordEncoder("gru"), BadConfig);
  KeyValues kv{{"embeddings", "glove"}};
  CHECK_THROWS_AS(ArchitectureConfig::FromKeyValues(kv), BadConfig);
}

}  // namespace
}  // namespace csner
