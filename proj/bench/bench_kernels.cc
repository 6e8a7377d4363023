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

// Serial reference versus OpenMP kernels: GEMM, batch tagging and corpus
// evaluation.

#include <fstream>
#include <vector>

#include <benchmark/benchmark.h>

#include "csner/eval.h"
#include "csner/kernels.h"
#include "csner/model.h"
#include "csner/random.h"

namespace {

using namespace csner;

std::vector<double> Random(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double &x : v) x = rng.Uniform(-1.0, 1.0);
  return v;
}

template <bool kParallel>
void BM_Gemm(benchmark::State &state) {
  const size_t n = static_cast<size_t>(state.range(0));
  std::vector<double> a = Random(n * n, 1), b = Random(n * n, 2), c(n * n);
  for (auto _ : state) {
    if (kParallel) {
      kernels::Gemm(a.data(), kernels::Trans::kNo, b.data(), kernels::Trans::kYes, c.data(), n, n, n);
    } else {
      kernels::GemmSerial(a.data(), kernels::Trans::kNo, b.data(), kernels::Trans::kYes, c.data(), n,
                          n, n);
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n * n));
}
BENCHMARK(BM_Gemm<false>)->Name("GemmSerial")->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Gemm<true>)->Name("Gemm")->Arg(64)->Arg(128)->Arg(256);

const Corpus &Desk() {
  static const Corpus corpus = [] {
    std::ifstream in(std::string(CSNER_TEST_DATA) + "/desk/test.conll");
    return ReadConll(in, LabelSchema::Canonical());
  }();
  return corpus;
}

const TaggerModel &Model() {
  static const TaggerModel model = TaggerModel::Create(ArchitectureConfig(), Desk(), 1);
  return model;
}

std::vector<std::vector<std::string>> Tokens() {
  std::vector<std::vector<std::string>> out;
  for (const auto &s : Desk().sentences) out.push_back(s.surfaces());
  return out;
}

template <bool kParallel>
void BM_PredictBatch(benchmark::State &state) {
  auto tokens = Tokens();
  for (auto _ : state) {
    auto tags = kParallel ? Model().PredictBatch(tokens) : Model().PredictBatchSerial(tokens);
    benchmark::DoNotOptimize(tags.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(tokens.size()));
}
BENCHMARK(BM_PredictBatch<false>)->Name("PredictBatchSerial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictBatch<true>)->Name("PredictBatch")->Unit(benchmark::kMillisecond);

template <bool kParallel>
void BM_Evaluate(benchmark::State &state) {
  std::vector<std::vector<Tag>> tags = Model().PredictBatch(Tokens());
  for (auto _ : state) {
    EvaluationReport r = kParallel ? Evaluate(Desk(), tags) : EvaluateSerial(Desk(), tags);
    benchmark::DoNotOptimize(r.micro.f1);
  }
}
BENCHMARK(BM_Evaluate<false>)->Name("EvaluateSerial");
BENCHMARK(BM_Evaluate<true>)->Name("Evaluate");

}  // namespace

BENCHMARK_MAIN();
