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

#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"

#include "common/oracles.h"
#include "csner/error.h"
#include "csner/model.h"

namespace csner {
namespace {

const std::string kData = CSNER_TEST_DATA;

Corpus Toy() {
  std::ifstream in(kData + "/toy.conll");
  REQUIRE(in);
  return ReadConll(in, LabelSchema::Canonical());
}

ArchitectureConfig Tiny(const ArchitectureConfig &arch) {
  ArchitectureConfig c = arch;
  c.word_dim = 3;
  c.char_dim = 2;
  c.char_filters = 2;
  c.char_window = 2;
  c.word_window = 3;
  c.hidden_dim = 2;
  c.dropout = 0.0;
  return c;
}

double AnalyticGradients(TaggerModel &model, const Sentence &s) {
  std::vector<Parameter *> params = model.parameters();
  for (Parameter *p : params) p->ZeroGrad();
  Tape tape;
  for (Parameter *p : params) tape.Track(*p);
  Var loss = model.Loss(tape, s, false, nullptr);
  tape.Backward(loss);
  return loss.scalar();
}

TEST_CASE("NLL gradients through all six architectures") {
  Corpus toy = Toy();
  for (const auto &arch : ArchitectureConfig::AllSix(Tiny(ArchitectureConfig()))) {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      CAPTURE(arch.Name());
      CAPTURE(seed);
      TaggerModel model = TaggerModel::Create(arch, toy, seed);
      const Sentence &s = toy.sentences[(seed * 7) % toy.sentences.size()];
      Sentence shortened = s;
      if (shortened.tokens.size() > 4) shortened.tokens.resize(4);
      AnalyticGradients(model, shortened);
      double err = oracle::MaxRelativeError(
          [&] {
            Tape tape;
            return model.Loss(tape, shortened, false, nullptr).scalar();
          },
          model.parameters());
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("all six architectures share the emission contract") {
  Corpus toy = Toy();
  std::vector<std::string> tokens{"Marrow", "solves", "unseen", "words"};
  for (const auto &arch : ArchitectureConfig::AllSix(Tiny(ArchitectureConfig()))) {
    TaggerModel model = TaggerModel::Create(arch, toy, 3);
    Tape tape;
    Var em = model.Emissions(tape, tokens, false, nullptr);
    CHECK(em.rows() == 4);
    CHECK(em.cols() == 15);
    std::set<std::string> names;
    for (const Parameter *p : model.parameters()) names.insert(p->name);
    CHECK(names.size() == model.parameters().size());
  }
}

TEST_CASE("prediction is deterministic and valid BIO") {
  Corpus toy = Toy();
  ArchitectureConfig arch;
  arch.hidden_dim = 8;
  arch.word_dim = 8;
  TaggerModel model = TaggerModel::Create(arch, toy, 4);
  std::vector<std::vector<std::string>> batch;
  for (const auto &s : toy.sentences) batch.push_back(s.surfaces());
  auto serial = model.PredictBatchSerial(batch);
  auto parallel = model.PredictBatch(batch);
  CHECK(serial == parallel);
  for (const auto &tags : serial) CHECK_NOTHROW(DecodeBio(tags, false));
  CHECK(model.Predict(batch[0]) == serial[0]);
  CHECK(model.Predict(std::vector<std::string>{}).empty());
}

TEST_CASE("dropout only in training mode") {
  Corpus toy = Toy();
  TaggerModel model = TaggerModel::Create(ArchitectureConfig(), toy, 5);
  std::vector<std::string> tokens = toy.sentences[0].surfaces();
  Tape tape;
  Tensor a = model.Emissions(tape, tokens, false, nullptr).value();
  Tensor b = model.Emissions(tape, tokens, false, nullptr).value();
  CHECK(a == b);
  Rng rng(1);
  Tensor c = model.Emissions(tape, tokens, true, &rng).value();
  CHECK_FALSE(a == c);
  CHECK_THROWS_AS(model.Emissions(tape, tokens, true, nullptr), BadConfig);
}

TEST_CASE("same seed, same parameters") {
  Corpus toy = Toy();
  TaggerModel a = TaggerModel::Create(ArchitectureConfig(), toy, 9);
  TaggerModel b = TaggerModel::Create(ArchitectureConfig(), toy, 9);
  TaggerModel c = TaggerModel::Create(ArchitectureConfig(), toy, 10);
  auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  bool all_equal = true, any_diff = false;
  for (size_t i = 0; i < pa.size(); ++i) {
    all_equal = all_equal && pa[i]->value == pb[i]->value;
    any_diff = any_diff || !(pa[i]->value == pc[i]->value);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("pretrained embeddings") {
  Corpus toy = Toy();
  ArchitectureConfig arch;
  arch.embeddings = EmbeddingSource::kPretrained;
  arch.word_dim = 8;
  CHECK_THROWS_AS(TaggerModel::Create(arch, toy, 1), BadConfig);
  std::ifstream vectors(kData + "/vectors.txt");
  TaggerModel model = TaggerModel::Create(arch, toy, 1, &vectors);
  const EmbeddingTable &table = model.word_table();
  CHECK(table.lowercase());
  CHECK(table.Lookup("Graph") == table.Lookup("graph"));
  CHECK(table.vocab().Contains("zebra"));
  CHECK(table.vocab().Contains("orchid"));
  std::ifstream again(kData + "/vectors.txt");
  std::string header, line;
  std::getline(again, header);
  std::getline(again, line);
  std::istringstream fields(line);
  std::string token;
  fields >> token;
  auto row = table.Row(token);
  for (double x : row) {
    double want;
    fields >> want;
    CHECK(x == want);
  }
  arch.word_dim = 9;
  std::ifstream wrong(kData + "/vectors.txt");
  CHECK_THROWS_AS(TaggerModel::Create(arch, toy, 1, &wrong), DimMismatch);
}

}  // namespace
}  // namespace csner
