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

#ifndef CSNER_TRAIN_H_
#define CSNER_TRAIN_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "csner/config.h"
#include "csner/corpus.h"
#include "csner/encoders.h"
#include "csner/eval.h"
#include "csner/model.h"

namespace csner {

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.05;
  // Epoch e (from 0) uses learning_rate / (1 + decay * e).
  double decay = 0.05;
  int batch_size = 10;  // sentences per update
  uint64_t seed = 1;
  // Epochs without a dev improvement before stopping.
  int patience = 10;
  // Rescale the batch gradient to this global L2 norm when above it; 0 is off.
  double clip_norm = 5.0;
  // Stop as soon as dev micro F1 reaches this value; above 100 is off.
  double stop_at_f1 = 101.0;

  // Throws BadConfig on non-positive sizes or rates.
  void Validate() const;
  KeyValues ToKeyValues() const;
  static TrainConfig FromKeyValues(const KeyValues &kv);
};

struct EpochRecord {
  int epoch = 0;  // from 1
  double train_loss = 0.0;  // summed NLL over the epoch
  double dev_micro_f1 = 0.0;
};

// {"epoch":..,"train_loss":..,"dev_micro_f1":..}
std::string HistoryJson(const EpochRecord &record);

struct TrainResult {
  TaggerModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
};

// Tag every sentence of `corpus` and score against its gold tags.
EvaluationReport EvaluateModel(const TaggerModel &model, const Corpus &corpus);

// SGD on per-sentence CRF NLL with seeded shuffling and dropout. The model
// with the best dev micro F1 is returned. Throws Divergence when a loss is
// not finite.
TrainResult Train(const ArchitectureConfig &arch, const Corpus &train, const Corpus &dev,
                  const TrainConfig &tc, std::istream *pretrained = nullptr,
                  const std::function<void(const EpochRecord &)> &on_epoch = {});

// Continues training an existing model in place; used by Train.
TrainResult TrainModel(TaggerModel model, const Corpus &train, const Corpus &dev,
                       const TrainConfig &tc,
                       const std::function<void(const EpochRecord &)> &on_epoch = {});

}  // namespace csner

#endif  // CSNER_TRAIN_H_
