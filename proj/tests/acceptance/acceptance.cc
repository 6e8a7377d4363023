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

// Acceptance checks. One PASS/FAIL line per criterion; the directional
// comparison on the auto-labeled titles is reported without failing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "common/cli.h"
#include "common/oracles.h"
#include "csner/crf.h"
#include "csner/error.h"
#include "csner/eval.h"
#include "csner/serialize.h"
#include "csner/service.h"
#include "csner/train.h"

namespace csner {
namespace {

const std::string kData = CSNER_TEST_DATA;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Corpus ReadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ReadConll(in, LabelSchema::Canonical());
}

std::string Fmt(const char *format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

Outcome CrfOracle() {
  Rng rng(101);
  int bad_z = 0, bad_path = 0, bad_score = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int T = 1 + static_cast<int>(rng.Index(6));
    const int L = 1 + static_cast<int>(rng.Index(4));
    Tensor em = oracle::RandomTensor(T, L, rng, 3.0);
    Tensor trans = oracle::RandomTensor(L + 2, L + 2, rng, 3.0);
    const double want = oracle::BruteLogPartition(em, trans);
    const double got = LogPartition(em, trans);
    const double rel = std::abs(got - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, rel);
    if (!(rel <= 1e-9)) ++bad_z;
    ViterbiResult v = Viterbi(em, trans);
    oracle::BestPath b = oracle::BruteViterbi(em, trans);
    if (v.tags != b.path) ++bad_path;
    if (v.score != b.score) ++bad_score;
  }
  return {bad_z == 0 && bad_path == 0 && bad_score == 0,
          "100 instances, max rel err " + Fmt("%.2e", worst) + ", log Z misses " +
              std::to_string(bad_z) + ", path misses " + std::to_string(bad_path) +
              ", score misses " + std::to_string(bad_score)};
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

Outcome Gradients() {
  Corpus toy = ReadFile(kData + "/toy.conll");
  double worst = 0.0;
  int failures = 0, checks = 0;
  for (const auto &arch : ArchitectureConfig::AllSix(Tiny(ArchitectureConfig()))) {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      TaggerModel model = TaggerModel::Create(arch, toy, seed);
      Sentence s = toy.sentences[(seed * 11) % toy.sentences.size()];
      if (s.tokens.size() > 4) s.tokens.resize(4);
      std::vector<Parameter *> params = model.parameters();
      for (Parameter *p : params) p->ZeroGrad();
      Tape tape;
      for (Parameter *p : params) tape.Track(*p);
      tape.Backward(model.Loss(tape, s, false, nullptr));
      const double err = oracle::MaxRelativeError(
          [&] {
            Tape t;
            return model.Loss(t, s, false, nullptr).scalar();
          },
          params);
      worst = std::max(worst, err);
      ++checks;
      if (!(err < 1e-4)) ++failures;
    }
  }
  return {failures == 0, std::to_string(checks) + " checks, max rel err " + Fmt("%.2e", worst)};
}

Outcome Overfit() {
  Corpus toy = ReadFile(kData + "/toy.conll");
  TrainConfig tc;
  tc.epochs = 200;
  tc.patience = 200;
  tc.stop_at_f1 = 100.0;
  tc.seed = 1;
  bool pass = true;
  std::string detail;
  for (const auto &arch : ArchitectureConfig::AllSix(ArchitectureConfig())) {
    TrainResult a = Train(arch, toy, toy, tc);
    TrainResult b = Train(arch, toy, toy, tc);
    const double f1 = EvaluateModel(a.model, toy).micro.f1;
    bool same = a.history.size() == b.history.size();
    auto pa = a.model.parameters(), pb = b.model.parameters();
    for (size_t i = 0; same && i < pa.size(); ++i) same = pa[i]->value == pb[i]->value;
    for (size_t i = 0; same && i < a.history.size(); ++i) {
      same = a.history[i].train_loss == b.history[i].train_loss;
    }
    pass = pass && f1 == 100.0 && same;
    if (!detail.empty()) detail += "; ";
    detail += arch.Name() + ": F1 " + Fmt("%.2f", f1) + " at epoch " +
              std::to_string(a.best_epoch) + (same ? "" : " NONDETERMINISTIC");
  }
  return {pass, detail};
}

Outcome BioRoundTrip() {
  const LabelSchema schema = LabelSchema::Canonical();
  Rng rng(4242);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int length = 1 + static_cast<int>(rng.Index(20));
    auto spans = oracle::RandomSpans(length, schema.num_types(), rng);
    auto tags = EncodeBio(spans, length);
    if (DecodeBio(tags, false) != spans || DecodeBio(tags, true) != spans) ++failures;
  }
  auto tags = [&](std::initializer_list<const char *> names) {
    std::vector<Tag> out;
    for (const char *n : names) out.push_back(schema.ParseTag(n));
    return out;
  };
  const int tool = schema.FindType("tool"), method = schema.FindType("method");
  struct Crafted {
    std::vector<Tag> tags;
    std::vector<EntitySpan> repaired;
  };
  std::vector<Crafted> crafted{
      {tags({"I-tool", "I-tool", "O"}), {{tool, 0, 2}}},
      {tags({"B-tool", "O", "I-tool"}), {{tool, 0, 1}, {tool, 2, 3}}},
      {tags({"B-tool", "I-method", "I-method"}), {{tool, 0, 1}, {method, 1, 3}}},
      {tags({"O", "I-method"}), {{method, 1, 2}}},
  };
  int repair_failures = 0;
  for (const auto &c : crafted) {
    bool threw = false;
    try {
      DecodeBio(c.tags, false);
    } catch (const InvalidTransition &) {
      threw = true;
    }
    auto got = DecodeBio(c.tags, true);
    auto again = EncodeBio(got, static_cast<int>(c.tags.size()));
    if (!threw || got != c.repaired || DecodeBio(again, false) != got) ++repair_failures;
  }
  return {failures == 0 && repair_failures == 0,
          "1000 random span sets, " + std::to_string(failures) + " failures; " +
              std::to_string(crafted.size()) + " crafted repairs, " +
              std::to_string(repair_failures) + " failures"};
}

Outcome EvaluationOracle() {
  Corpus gold = ReadFile(kData + "/eval/gold.conll");
  Corpus pred = ReadFile(kData + "/eval/pred.conll");
  EvaluationReport r = Evaluate(gold, pred);
  // Hand counts: research-problem 3/3/1, method 3/2/1, dataset 2/0/2.
  std::map<std::string, std::array<int64_t, 3>> want{
      {"research-problem", {3, 3, 1}}, {"method", {3, 2, 1}}, {"dataset", {2, 0, 2}}};
  bool pass = true;
  for (const auto &t : r.per_type) {
    std::array<int64_t, 3> w{0, 0, 0};
    if (want.count(t.type)) w = want[t.type];
    pass = pass && t.counts.tp == w[0] && t.counts.fp == w[1] && t.counts.fn == w[2];
  }
  pass = pass && std::abs(r.micro.precision - 800.0 / 13.0) < 1e-9 &&
         std::abs(r.micro.recall - 200.0 / 3.0) < 1e-9 && std::abs(r.micro.f1 - 64.0) < 1e-9;
  EvaluationReport perfect = Evaluate(gold, gold);
  const std::string table = FormatReport(perfect);
  const bool perfect_ok = perfect.micro.f1 == 100.0 &&
                          table.find("micro                 100.00  100.00  100.00") !=
                              std::string::npos;

  Corpus a = ReadFile(kData + "/iaa/a.conll");
  Corpus b = ReadFile(kData + "/iaa/b.conll");
  // p_o = 41/50, p_e = 549/2500, so kappa = 1501/1951.
  const double kappa = Agreement(a, b).cohen_kappa;
  const double hand = 1501.0 / 1951.0;
  const bool kappa_ok = std::abs(kappa - hand) < 1e-9;
  const bool self_ok = Agreement(a, a).cohen_kappa == 1.0;
  return {pass && perfect_ok && kappa_ok && self_ok,
          "micro P/R/F1 " + Fmt("%.4f/%.4f/%.4f", r.micro.precision, r.micro.recall, r.micro.f1) +
              ", perfect " + (perfect_ok ? "100.00" : "wrong") + ", kappa " +
              Fmt("%.9f vs %.9f", kappa, hand) + ", self-kappa " + (self_ok ? "1" : "wrong")};
}

Outcome DistanceLabeling() {
  LabelSchema schema = LabelSchema::Canonical();
  std::ifstream lex_in(kData + "/distance/lexicon.tsv");
  Lexicon lexicon = Lexicon::Load(lex_in, schema);
  std::map<std::string, int> entries(lexicon.entries().begin(), lexicon.entries().end());
  std::ifstream titles(kData + "/distance/titles.txt");
  std::string line;
  int n = 0, mismatches = 0, spans = 0;
  while (std::getline(titles, line)) {
    ++n;
    Sentence s = DistanceLabel(line, lexicon);
    auto want = oracle::ExhaustiveLexiconMatch(s.surfaces(), entries);
    if (s.spans(false) != want) ++mismatches;
    spans += static_cast<int>(want.size());
  }
  return {n == 20 && lexicon.size() == 5 && mismatches == 0,
          std::to_string(n) + " titles, " + std::to_string(lexicon.size()) + " phrases, " +
              std::to_string(spans) + " spans, " + std::to_string(mismatches) + " mismatches"};
}

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats MeanSd(const std::vector<double> &v) {
  Stats s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(s.sd / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

Outcome Directional() {
  Corpus train = ReadFile(kData + "/desk/train.conll");
  Corpus dev = ReadFile(kData + "/desk/dev.conll");
  Corpus test = ReadFile(kData + "/desk/test.conll");
  const size_t total = train.sentences.size() + dev.sentences.size() + test.sentences.size();
  ArchitectureConfig lstm;
  lstm.word_encoder = WordEncoderKind::kLstm;
  lstm.use_char_cnn = false;
  ArchitectureConfig bichar;
  bichar.word_encoder = WordEncoderKind::kBiLstm;
  bichar.use_char_cnn = true;
  std::vector<double> f_lstm, f_bichar;
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    TrainConfig tc;
    tc.epochs = 10;
    tc.patience = 3;
    tc.seed = seed;
    f_lstm.push_back(EvaluateModel(Train(lstm, train, dev, tc).model, test).micro.f1);
    f_bichar.push_back(EvaluateModel(Train(bichar, train, dev, tc).model, test).micro.f1);
  }
  Stats a = MeanSd(f_lstm), b = MeanSd(f_bichar);
  return {b.mean >= a.mean, std::to_string(total) + " titles; test micro F1 " + lstm.Name() +
                                Fmt(" %.2f +- %.2f", a.mean, a.sd) + ", " + bichar.Name() +
                                Fmt(" %.2f +- %.2f (3 seeds)", b.mean, b.sd)};
}

Outcome Interface() {
  testing::TempDir dir;
  Corpus toy = ReadFile(kData + "/toy.conll");
  ArchitectureConfig arch;
  arch.word_dim = 16;
  arch.hidden_dim = 16;
  arch.char_filters = 10;
  TrainConfig tc;
  tc.epochs = 60;
  tc.stop_at_f1 = 100.0;
  TaggerModel model = Train(arch, toy, toy, tc).model;
  const std::string path = dir / "model.bin";
  SaveModel(model, path);
  TaggerModel loaded = LoadModel(path);
  std::vector<std::vector<std::string>> tokens;
  for (const auto &s : toy.sentences) tokens.push_back(s.surfaces());
  bool params_equal = true;
  auto pa = model.parameters(), pb = loaded.parameters();
  params_equal = pa.size() == pb.size();
  for (size_t i = 0; params_equal && i < pa.size(); ++i) params_equal = pa[i]->value == pb[i]->value;
  const bool round_trip = params_equal && model.PredictBatch(tokens) == loaded.PredictBatch(tokens);

  std::vector<std::string> lines;
  std::string text;
  for (const auto &t : tokens) {
    std::string line;
    for (const auto &w : t) line += (line.empty() ? "" : " ") + w;
    lines.push_back(line);
    text += line + '\n';
  }
  lines.push_back("Unseen Words : a Fresh-Title for 2026");
  text += lines.back() + '\n';
  testing::Spit(dir / "in.txt", text);
  testing::CliResult tagged =
      testing::RunCli(dir, "tag --model " + path + " --format json --input " + (dir / "in.txt"));
  std::vector<std::string> cli_lines;
  std::istringstream cli_out(tagged.out);
  for (std::string l; std::getline(cli_out, l);) cli_lines.push_back(l);
  int differing = 0;
  {
    testing::CliServer server(dir, "--model " + path);
    httplib::Client client("127.0.0.1", server.port());
    client.set_connection_timeout(5);
    for (size_t i = 0; i < lines.size(); ++i) {
      auto res = client.Post("/annotate", nlohmann::json{{"text", lines[i]}}.dump(),
                             "application/json");
      if (!res || res->status != 200 || i >= cli_lines.size() || res->body != cli_lines[i]) {
        ++differing;
      }
    }
  }
  const bool same = tagged.exit_code == 0 && cli_lines.size() == lines.size() && differing == 0;

  int bad_codes = 0;
  for (const char *usage : {"", "nosuchcommand", "tag", "eval --gold x.conll --pred y --bogus",
                            "serve --model m --port 99999"}) {
    if (testing::RunCli(dir, usage).exit_code != 2) ++bad_codes;
  }
  auto data = [&](const std::string &args, const std::string &name) {
    testing::CliResult r = testing::RunCli(dir, args);
    if (r.exit_code != 1 || r.err.find(name + ":") == std::string::npos) ++bad_codes;
  };
  data("eval --gold " + kData + "/toy.conll --pred " + kData + "/eval/gold.conll",
       "AlignmentError");
  data("tag --model " + kData + "/toy.conll --input " + (dir / "in.txt"), "Corrupt");
  data("iaa --a " + (dir / "absent.conll") + " --b " + (dir / "absent.conll"), "IoError");
  data("merge --input " + kData + "/merge/unknown.conll --keep-all", "UnknownLabel");

  return {round_trip && same && bad_codes == 0,
          std::string("save/load ") + (round_trip ? "identical" : "DIFFERS") + ", " +
              std::to_string(lines.size()) + " texts via CLI and REST, " +
              std::to_string(differing) + " differing, " + std::to_string(bad_codes) +
              " wrong exit codes"};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
  double time_limit_s;  // 0: none
  bool soft;
};

}  // namespace
}  // namespace csner

int main() {
  using namespace csner;
  std::vector<Criterion> criteria{
      {"crf-oracle", CrfOracle, 10.0, false},
      {"gradients", Gradients, 60.0, false},
      {"overfit", Overfit, 300.0, false},
      {"bio-round-trip", BioRoundTrip, 0.0, false},
      {"evaluation-oracle", EvaluationOracle, 0.0, false},
      {"distance-labeling", DistanceLabeling, 0.0, false},
      {"directional-bilstm-char-vs-lstm", Directional, 0.0, true},
      {"interface", Interface, 0.0, false},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion &c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool timely = c.time_limit_s <= 0.0 || secs < c.time_limit_s;
    std::string status;
    if (c.soft) {
      status = o.pass ? "PASS" : "WARN";
    } else {
      status = o.pass && timely ? "PASS" : "FAIL";
      if (status == "FAIL") ++failed;
    }
    char timing[64];
    if (c.time_limit_s > 0.0) {
      std::snprintf(timing, sizeof(timing), "%.1fs, limit %.0fs", secs, c.time_limit_s);
    } else {
      std::snprintf(timing, sizeof(timing), "%.1fs", secs);
    }
    std::cout << status << ' ' << (i + 1) << ' ' << c.name << (c.soft ? " (reported)" : "")
              << ": " << o.detail << " [" << timing << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
