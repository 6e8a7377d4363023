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

// Command-line front end: corpus preparation, training, tagging, scoring and
// the tagging service.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csner/config.h"
#include "csner/corpus.h"
#include "csner/error.h"
#include "csner/eval.h"
#include "csner/serialize.h"
#include "csner/service.h"
#include "csner/train.h"

namespace {

using namespace csner;

constexpr int kDataError = 1;
constexpr int kUsageError = 2;

class Input {
 public:
  explicit Input(const std::string &path) {
    if (path == "-") {
      stream_ = &std::cin;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open " + path);
    stream_ = file_.get();
  }
  std::istream &get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream *stream_ = nullptr;
};

class Output {
 public:
  explicit Output(const std::string &path) {
    if (path == "-") {
      stream_ = &std::cout;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open " + path + " for writing");
    stream_ = file_.get();
  }
  std::ostream &get() { return *stream_; }
  void Close() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream *stream_ = nullptr;
};

Corpus ReadCorpusFile(const std::string &path) {
  Input in(path);
  return ReadConll(in.get(), LabelSchema::Canonical());
}

void WriteCorpusFile(const Corpus &corpus, const std::string &path) {
  Output out(path);
  WriteConll(corpus, out.get());
  out.Close();
}

std::vector<std::string> ReadLines(const std::string &path) {
  Input in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in.get(), line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool Blank(const std::string &s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

// "bilstm", "lstm+char", ...
void ApplyArchitecture(const std::string &name, ArchitectureConfig &config) {
  std::string encoder = name;
  config.use_char_cnn = false;
  const std::string suffix = "+char";
  if (encoder.size() > suffix.size() &&
      encoder.compare(encoder.size() - suffix.size(), suffix.size(), suffix) == 0) {
    encoder.resize(encoder.size() - suffix.size());
    config.use_char_cnn = true;
  }
  config.word_encoder = ParseWordEncoder(encoder);
}

std::vector<size_t> ParseCaps(const std::string &text) {
  std::vector<size_t> caps;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    KeyValues kv{{"cap", item}};
    uint64_t v = 0;
    ReadUint64(kv, "cap", v);
    caps.push_back(v);
  }
  return caps;
}

std::array<double, 3> ParseRatios(const std::string &text) {
  std::array<double, 3> ratios{};
  std::stringstream in(text);
  std::string item;
  size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 3) throw BadRatios("expected three ratios, got more");
    KeyValues kv{{"ratio", item}};
    ReadDouble(kv, "ratio", ratios[n++]);
  }
  if (n != 3) throw BadRatios("expected three ratios, got " + std::to_string(n));
  return ratios;
}

struct TrainArgs {
  std::string train, dev, out = "model.bin", history, config, arch, embeddings, vectors;
  int epochs = 0;
  double lr = 0.0;
};

int RunTrain(const TrainArgs &a, const uint64_t *seed) {
  KeyValues kv;
  if (!a.config.empty()) kv = ReadKeyValuesFile(a.config);
  ArchitectureConfig arch = ArchitectureConfig::FromKeyValues(kv);
  TrainConfig tc = TrainConfig::FromKeyValues(kv);
  if (!a.arch.empty()) ApplyArchitecture(a.arch, arch);
  if (!a.embeddings.empty()) {
    if (a.embeddings == "trained") {
      arch.embeddings = EmbeddingSource::kTrained;
    } else if (a.embeddings == "pretrained") {
      arch.embeddings = EmbeddingSource::kPretrained;
    } else {
      throw BadConfig("embeddings must be trained or pretrained");
    }
  }
  if (a.epochs > 0) tc.epochs = a.epochs;
  if (a.lr > 0.0) tc.learning_rate = a.lr;
  if (seed != nullptr) tc.seed = *seed;
  arch.Validate();
  tc.Validate();

  Corpus train = ReadCorpusFile(a.train);
  Corpus dev = ReadCorpusFile(a.dev);
  std::unique_ptr<Input> vectors;
  if (arch.embeddings == EmbeddingSource::kPretrained) {
    if (a.vectors.empty()) throw BadConfig("--embeddings pretrained needs --vectors");
    vectors = std::make_unique<Input>(a.vectors);
  }
  std::unique_ptr<Output> history;
  if (!a.history.empty()) history = std::make_unique<Output>(a.history);
  std::cerr << "training " << arch.Name() << " on " << train.sentences.size()
            << " sentences\n";
  TrainResult result = Train(arch, train, dev, tc, vectors ? &vectors->get() : nullptr,
                             [&](const EpochRecord &r) {
                               if (history) history->get() << HistoryJson(r) << '\n';
                             });
  if (history) history->Close();
  SaveModel(result.model, a.out);
  std::cout << "best_epoch\t" << result.best_epoch << '\n';
  std::cout << FormatReport(EvaluateModel(result.model, dev));
  return 0;
}

int RunTag(const std::string &model_path, const std::string &input, const std::string &output,
           const std::string &format, const std::string &part) {
  TaggerModel model = LoadModel(model_path);
  Part p = ParsePart(part);
  std::vector<std::string> lines;
  for (auto &line : ReadLines(input)) {
    if (!Blank(line)) lines.push_back(std::move(line));
  }
  Output out(output);
  if (format == "json") {
    for (const auto &line : lines) out.get() << Annotate(model, line).dump() << '\n';
  } else {
    std::vector<std::vector<std::string>> tokens;
    for (const auto &line : lines) tokens.push_back(Tokenize(line));
    std::vector<std::vector<Tag>> tags = model.PredictBatch(tokens);
    Corpus corpus;
    corpus.schema = model.schema();
    for (size_t i = 0; i < tokens.size(); ++i) {
      Sentence s;
      s.part = p;
      for (size_t t = 0; t < tokens[i].size(); ++t) s.tokens.push_back({tokens[i][t], tags[i][t]});
      corpus.sentences.push_back(std::move(s));
    }
    WriteConll(corpus, out.get());
  }
  out.Close();
  return 0;
}

int RunMerge(const std::vector<std::string> &inputs, const std::vector<std::string> &sources,
             const std::string &output, bool keep_all) {
  if (!sources.empty() && sources.size() != inputs.size()) {
    throw BadConfig("give one --source per --input");
  }
  std::vector<RawCorpus> parts;
  for (size_t i = 0; i < inputs.size(); ++i) {
    Input in(inputs[i]);
    RawCorpus raw = ReadRawConll(in.get());
    if (!sources.empty()) {
      for (auto &s : raw.sentences) {
        if (s.source.empty()) s.source = sources[i];
      }
    }
    parts.push_back(std::move(raw));
  }
  MergeOptions options = keep_all ? MergeOptions{} : MergeOptions::Default();
  MergeStats stats;
  Corpus merged = MergeCorpora(parts, LabelSchema::Canonical(), options, &stats);
  WriteCorpusFile(merged, output);
  std::cerr << "input_sentences\t" << stats.input_sentences << '\n'
            << "duplicates\t" << stats.duplicates << '\n'
            << "dropped_spans\t" << stats.dropped_spans << '\n'
            << "output_sentences\t" << merged.sentences.size() << '\n';
  for (const auto &[label, n] : stats.dropped_by_label) {
    std::cerr << "dropped\t" << label << '\t' << n << '\n';
  }
  return 0;
}

int RunDistanceLabel(const std::string &lexicon_path, const std::string &input,
                     const std::string &output, const std::string &source,
                     const std::string &part) {
  LabelSchema schema = LabelSchema::Canonical();
  Input lex_in(lexicon_path);
  Lexicon lexicon = Lexicon::Load(lex_in.get(), schema);
  Part p = ParsePart(part);
  Corpus corpus;
  corpus.schema = schema;
  for (const auto &line : ReadLines(input)) {
    if (Blank(line)) continue;
    corpus.sentences.push_back(DistanceLabel(line, lexicon, source, p));
  }
  WriteCorpusFile(corpus, output);
  return 0;
}

int RunSelect(const std::string &input, const std::string &output, const std::string &part,
              const std::string &caps_text, uint64_t seed) {
  Corpus corpus = ReadCorpusFile(input);
  std::vector<SelectionGroup> groups =
      ParsePart(part) == Part::kTitle ? TitleSelectionGroups() : AbstractSelectionGroups();
  std::vector<size_t> caps = ParseCaps(caps_text);
  if (caps.size() != groups.size()) {
    throw BadConfig("expected " + std::to_string(groups.size()) + " caps, got " +
                    std::to_string(caps.size()));
  }
  std::vector<size_t> sizes;
  Corpus selected = StratifySelect(corpus, groups, caps, seed, &sizes);
  WriteCorpusFile(selected, output);
  for (size_t g = 0; g < groups.size(); ++g) {
    std::cerr << groups[g].name << '\t' << sizes[g] << '\n';
  }
  return 0;
}

int RunSplit(const std::string &input, const std::string &prefix, const std::string &ratios,
             uint64_t seed) {
  Splits splits = SplitCorpus(ReadCorpusFile(input), ParseRatios(ratios), seed);
  WriteCorpusFile(splits.train, prefix + "train.conll");
  WriteCorpusFile(splits.dev, prefix + "dev.conll");
  WriteCorpusFile(splits.test, prefix + "test.conll");
  std::cerr << "train\t" << splits.train.sentences.size() << "\ndev\t"
            << splits.dev.sentences.size() << "\ntest\t" << splits.test.sentences.size() << '\n';
  return 0;
}

int RunServe(const std::string &model_path, const std::string &abstract_model,
             const std::string &host, int port) {
  TaggingService service;
  service.AddModel(Part::kTitle, LoadModel(model_path));
  if (!abstract_model.empty()) service.AddModel(Part::kAbstract, LoadModel(abstract_model));
  if (!service.Bind(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  std::cerr << "listening on " << host << ':' << service.port() << std::endl;
  service.Serve();
  return 0;
}

int Main(int argc, char **argv) {
  CLI::App app{"Contribution-centric entity tagging for computer science papers"};
  app.require_subcommand(1);

  uint64_t seed = 1;
  auto add_seed = [&seed](CLI::App *cmd) {
    return cmd->add_option("--seed", seed, "random seed");
  };

  TrainArgs ta;
  CLI::App *train = app.add_subcommand("train", "train a tagger");
  train->add_option("--train", ta.train, "training CoNLL file")->required();
  train->add_option("--dev", ta.dev, "dev CoNLL file")->required();
  train->add_option("--out", ta.out, "model output path");
  train->add_option("--history", ta.history, "per-epoch JSON lines");
  train->add_option("--config", ta.config, "key=value settings file");
  train->add_option("--arch", ta.arch, "cnn, lstm or bilstm, optionally +char");
  train->add_option("--embeddings", ta.embeddings, "trained or pretrained");
  train->add_option("--vectors", ta.vectors, "pretrained vector file");
  train->add_option("--epochs", ta.epochs, "epoch limit");
  train->add_option("--lr", ta.lr, "learning rate");
  CLI::Option *train_seed = add_seed(train);

  std::string model, input = "-", output = "-", format = "conll", part = "title";
  CLI::App *tag = app.add_subcommand("tag", "tag raw text, one sentence per line");
  tag->add_option("--model", model, "model file")->required();
  tag->add_option("--input", input, "text file, - for stdin");
  tag->add_option("--output", output, "output file, - for stdout");
  tag->add_option("--format", format, "conll or json")->check(CLI::IsMember({"conll", "json"}));
  tag->add_option("--part", part, "title or abstract");

  std::string gold, pred;
  CLI::App *eval = app.add_subcommand("eval", "span-level scores of predictions");
  eval->add_option("--gold", gold, "gold CoNLL file")->required();
  eval->add_option("--pred", pred, "predicted CoNLL file")->required();

  std::vector<std::string> inputs, sources;
  bool keep_all = false;
  CLI::App *merge = app.add_subcommand("merge", "merge CoNLL corpora onto the schema");
  merge->add_option("--input", inputs, "CoNLL files, in priority order")->required();
  merge->add_option("--source", sources, "source name per input");
  merge->add_option("--output", output, "output file, - for stdout");
  merge->add_flag("--keep-all", keep_all, "drop no labels");

  std::string lexicon, source;
  CLI::App *distance = app.add_subcommand("distance-label", "label text from a lexicon");
  distance->add_option("--lexicon", lexicon, "phrase<TAB>label file")->required();
  distance->add_option("--input", input, "text file, - for stdin");
  distance->add_option("--output", output, "output file, - for stdout");
  distance->add_option("--source", source, "source name recorded per sentence");
  distance->add_option("--part", part, "title or abstract");

  std::string caps;
  CLI::App *select = app.add_subcommand("select", "stratified sample by mention counts");
  select->add_option("--input", input, "CoNLL file")->required();
  select->add_option("--output", output, "output file, - for stdout");
  select->add_option("--part", part, "title or abstract groups");
  select->add_option("--caps", caps, "comma-separated cap per group")->required();
  add_seed(select);

  std::string prefix = "", ratios = "0.8,0.1,0.1";
  CLI::App *split = app.add_subcommand("split", "seeded train/dev/test split");
  split->add_option("--input", input, "CoNLL file")->required();
  split->add_option("--prefix", prefix, "output prefix; writes train/dev/test.conll")->required();
  split->add_option("--ratios", ratios, "three comma-separated ratios");
  add_seed(split);

  std::string ann_a, ann_b;
  CLI::App *iaa = app.add_subcommand("iaa", "agreement between two annotations");
  iaa->add_option("--a", ann_a, "first annotator CoNLL file")->required();
  iaa->add_option("--b", ann_b, "second annotator CoNLL file")->required();

  std::string abstract_model, host = "127.0.0.1";
  int port = 8080;
  CLI::App *serve = app.add_subcommand("serve", "HTTP tagging service");
  serve->add_option("--model", model, "title model file")->required();
  serve->add_option("--abstract-model", abstract_model, "abstract model file");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "port, 0 for any")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*train) return RunTrain(ta, train_seed->count() > 0 ? &seed : nullptr);
    if (*tag) return RunTag(model, input, output, format, part);
    if (*eval) {
      std::cout << FormatReport(Evaluate(ReadCorpusFile(gold), ReadCorpusFile(pred)));
      return 0;
    }
    if (*merge) return RunMerge(inputs, sources, output, keep_all);
    if (*distance) return RunDistanceLabel(lexicon, input, output, source, part);
    if (*select) return RunSelect(input, output, part, caps, seed);
    if (*split) return RunSplit(input, prefix, ratios, seed);
    if (*iaa) {
      Corpus a = ReadCorpusFile(ann_a);
      std::cout << FormatAgreement(Agreement(a, ReadCorpusFile(ann_b)), a.schema);
      return 0;
    }
    if (*serve) return RunServe(model, abstract_model, host, port);
  } catch (const Error &e) {
    std::cerr << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace

int main(int argc, char **argv) { return Main(argc, argv); }
