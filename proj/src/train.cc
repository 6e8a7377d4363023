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

#include "csner/train.h"

#include <cmath>
#include <numeric>

#include "json.hpp"

#include "csner/error.h"

namespace csner {

void TrainConfig::Validate() const {
  if (epochs <= 0) throw BadConfig("epochs must be positive");
  if (!(learning_rate > 0.0)) throw BadConfig("learning_rate must be positive");
  if (!(decay >= 0.0)) throw BadConfig("decay must be non-negative");
  if (batch_size <= 0) throw BadConfig("batch_size must be positive");
  if (patience <= 0) throw BadConfig("patience must be positive");
  if (!(clip_norm >= 0.0)) throw BadConfig("clip_norm must be non-negative");
}

KeyValues TrainConfig::ToKeyValues() const {
  return {
      {"epochs", std::to_string(epochs)},
      {"learning_rate", FormatDouble(learning_rate)},
      {"decay", FormatDouble(decay)},
      {"batch_size", std::to_string(batch_size)},
      {"seed", std::to_string(seed)},
      {"patience", std::to_string(patience)},
      {"clip_norm", FormatDouble(clip_norm)},
      {"stop_at_f1", FormatDouble(stop_at_f1)},
  };
}

TrainConfig TrainConfig::FromKeyValues(const KeyValues &kv) {
  TrainConfig tc;
  ReadInt(kv, "epochs", tc.epochs);
  ReadDouble(kv, "learning_rate", tc.learning_rate);
  ReadDouble(kv, "decay", tc.decay);
  ReadInt(kv, "batch_size", tc.batch_size);
  ReadUint64(kv, "seed", tc.seed);
  ReadInt(kv, "patience", tc.patience);
  ReadDouble(kv, "clip_norm", tc.clip_norm);
  ReadDouble(kv, "stop_at_f1", tc.stop_at_f1);
  tc.Validate();
  return tc;
}

std::string HistoryJson(const EpochRecord &record) {
  nlohmann::ordered_json j;
  j["epoch"] = record.epoch;
  j["train_loss"] = record.train_loss;
  j["dev_micro_f1"] = record.dev_micro_f1;
  return j.dump();
}

EvaluationReport EvaluateModel(const TaggerModel &model, const Corpus &corpus) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(corpus.sentences.size());
  for (const auto &s : corpus.sentences) tokens.push_back(s.surfaces());
  return Evaluate(corpus, model.PredictBatch(tokens));
}

namespace {

std::vector<Tensor> Snapshot(const TaggerModel &model) {
  std::vector<Tensor> out;
  for (const Parameter *p : model.parameters()) out.push_back(p->value);
  return out;
}

void Restore(TaggerModel &model, const std::vector<Tensor> &values) {
  std::vector<Parameter *> params = model.parameters();
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

void ClipGradients(std::span<Parameter *const> params, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (const Parameter *p : params) {
    for (double g : p->grad.values()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double factor = max_norm / norm;
  for (Parameter *p : params) {
    for (size_t i = 0; i < p->grad.size(); ++i) p->grad[i] *= factor;
  }
}

}  // namespace

TrainResult TrainModel(TaggerModel model, const Corpus &train, const Corpus &dev,
                       const TrainConfig &tc,
                       const std::function<void(const EpochRecord &)> &on_epoch) {
  tc.Validate();
  if (train.sentences.empty()) throw BadConfig("training corpus is empty");
  if (dev.sentences.empty()) throw BadConfig("dev corpus is empty");
  if (!(train.schema == model.schema()) || !(dev.schema == model.schema())) {
    throw BadConfig("corpus schema differs from the model schema");
  }

  Rng shuffle_rng(tc.seed ^ 0x5851f42d4c957f2dULL);
  Rng dropout_rng(tc.seed ^ 0x14057b7ef767814fULL);
  std::vector<Parameter *> params = model.parameters();
  std::vector<size_t> order(train.sentences.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<Tensor> best = Snapshot(model);
  TrainResult result{model, {}, 0, -1.0};
  int since_best = 0;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    const double lr = tc.learning_rate / (1.0 + tc.decay * epoch);
    shuffle_rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (size_t begin = 0; begin < order.size(); begin += tc.batch_size) {
      const size_t end = std::min(order.size(), begin + tc.batch_size);
      for (Parameter *p : params) p->ZeroGrad();
      for (size_t i = begin; i < end; ++i) {
        const Sentence &sentence = train.sentences[order[i]];
        if (sentence.tokens.empty()) continue;
        Tape tape;
        for (Parameter *p : params) {
          if (p->trainable) tape.Track(*p);
        }
        Var loss = model.Loss(tape, sentence, true, &dropout_rng);
        const double value = loss.scalar();
        if (!std::isfinite(value)) {
          throw Divergence("non-finite loss " + std::to_string(value) + " at epoch " +
                           std::to_string(epoch + 1) + ", sentence " +
                           std::to_string(order[i]));
        }
        epoch_loss += value;
        tape.Backward(loss);
      }
      ClipGradients(params, tc.clip_norm);
      for (Parameter *p : params) {
        if (!p->trainable) continue;
        for (size_t k = 0; k < p->value.size(); ++k) p->value[k] -= lr * p->grad[k];
      }
    }

    EpochRecord record;
    record.epoch = epoch + 1;
    record.train_loss = epoch_loss;
    record.dev_micro_f1 = EvaluateModel(model, dev).micro.f1;
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (record.dev_micro_f1 > result.best_dev_f1) {
      result.best_dev_f1 = record.dev_micro_f1;
      result.best_epoch = record.epoch;
      best = Snapshot(model);
      since_best = 0;
    } else if (++since_best >= tc.patience) {
      break;
    }
    if (record.dev_micro_f1 >= tc.stop_at_f1) break;
  }
  Restore(model, best);
  for (Parameter *p : model.parameters()) p->ZeroGrad();
  result.model = std::move(model);
  return result;
}

TrainResult Train(const ArchitectureConfig &arch, const Corpus &train, const Corpus &dev,
                  const TrainConfig &tc, std::istream *pretrained,
                  const std::function<void(const EpochRecord &)> &on_epoch) {
  tc.Validate();
  if (train.sentences.empty()) throw BadConfig("training corpus is empty");
  return TrainModel(TaggerModel::Create(arch, train, tc.seed, pretrained), train, dev, tc,
                    on_epoch);
}

}  // namespace csner
