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

#include "csner/serialize.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "csner/config.h"
#include "csner/error.h"

namespace csner {
namespace {

constexpr char kMagic[8] = {'C', 'S', 'N', 'E', 'R', 'M', 'D', 'L'};
constexpr uint8_t kTextBlock = 0;
constexpr uint8_t kTensorBlock = 1;
constexpr const char *kParamPrefix = "param:";

void PutU32(std::string &out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::string &out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  void Bytes(void *dst, size_t n) {
    if (data_.size() - pos_ < n) throw Corrupt("model file is truncated");
    std::memcpy(dst, data_.data() + pos_, n);
    pos_ += n;
  }
  uint64_t Uint(int width) {
    unsigned char b[8];
    Bytes(b, width);
    uint64_t v = 0;
    for (int i = width - 1; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::string String(uint64_t n) {
    if (data_.size() - pos_ < n) throw Corrupt("model file is truncated");
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  size_t pos_ = 0;
};

struct Block {
  uint8_t kind = 0;
  std::string payload;
};

void AddBlock(std::string &out, const std::string &name, uint8_t kind, const std::string &payload) {
  PutU32(out, static_cast<uint32_t>(name.size()));
  out += name;
  out.push_back(static_cast<char>(kind));
  PutU64(out, payload.size());
  out += payload;
}

std::string TensorPayload(const Tensor &t) {
  std::string out;
  PutU32(out, static_cast<uint32_t>(t.rows()));
  PutU32(out, static_cast<uint32_t>(t.cols()));
  for (double v : t.values()) PutU64(out, std::bit_cast<uint64_t>(v));
  return out;
}

Tensor ParseTensor(const std::string &name, const std::string &payload) {
  Reader r(payload);
  const uint64_t rows = r.Uint(4);
  const uint64_t cols = r.Uint(4);
  if (payload.size() != 8 + rows * cols * 8) {
    throw Corrupt("tensor block " + name + " has the wrong payload length");
  }
  Tensor t(static_cast<int>(rows), static_cast<int>(cols));
  for (size_t i = 0; i < t.size(); ++i) {
    t[i] = std::bit_cast<double>(r.Uint(8));
    if (!std::isfinite(t[i])) throw Corrupt("tensor block " + name + " holds a non-finite value");
  }
  return t;
}

const Block &Need(const std::map<std::string, Block> &blocks, const std::string &name,
                  uint8_t kind) {
  auto it = blocks.find(name);
  if (it == blocks.end()) throw Corrupt("model file lacks block " + name);
  if (it->second.kind != kind) throw Corrupt("block " + name + " has the wrong kind");
  return it->second;
}

template <typename F>
std::string Text(F &&write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

}  // namespace

void SaveModel(const TaggerModel &model, std::ostream &out) {
  std::vector<std::pair<std::string, std::pair<uint8_t, std::string>>> blocks;
  blocks.push_back({"schema.types", {kTextBlock, Text([&](std::ostream &s) { model.schema().SaveTypes(s); })}});
  blocks.push_back({"schema.aliases", {kTextBlock, Text([&](std::ostream &s) { model.schema().SaveAliases(s); })}});
  blocks.push_back({"config", {kTextBlock, Text([&](std::ostream &s) { WriteKeyValues(model.config().ToKeyValues(), s); })}});
  blocks.push_back({"vocab.words", {kTextBlock, Text([&](std::ostream &s) { model.word_table().vocab().Save(s); })}});
  blocks.push_back({"vocab.chars", {kTextBlock, Text([&](std::ostream &s) { model.char_vocab().Save(s); })}});
  for (const Parameter *p : model.parameters()) {
    blocks.push_back({kParamPrefix + p->name, {kTensorBlock, TensorPayload(p->value)}});
  }

  std::string data(kMagic, sizeof(kMagic));
  PutU32(data, kModelFormatVersion);
  PutU32(data, static_cast<uint32_t>(blocks.size()));
  for (const auto &[name, block] : blocks) AddBlock(data, name, block.first, block.second);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing model");
}

void SaveModel(const TaggerModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  SaveModel(model, out);
}

TaggerModel LoadModel(std::istream &in) {
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Reader r(std::move(data));
  char magic[sizeof(kMagic)];
  r.Bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Corrupt("not a model file");
  const uint64_t version = r.Uint(4);
  if (version != kModelFormatVersion) {
    throw VersionMismatch("model format version " + std::to_string(version) + ", expected " +
                          std::to_string(kModelFormatVersion));
  }
  const uint64_t count = r.Uint(4);
  std::map<std::string, Block> blocks;
  for (uint64_t i = 0; i < count; ++i) {
    std::string name = r.String(r.Uint(4));
    Block b;
    b.kind = static_cast<uint8_t>(r.Uint(1));
    b.payload = r.String(r.Uint(8));
    if (!blocks.emplace(std::move(name), std::move(b)).second) throw Corrupt("duplicate block");
  }
  if (!r.done()) throw Corrupt("trailing bytes after the last block");

  try {
    std::istringstream types(Need(blocks, "schema.types", kTextBlock).payload);
    std::istringstream aliases(Need(blocks, "schema.aliases", kTextBlock).payload);
    LabelSchema schema = LabelSchema::Load(types, &aliases);
    std::istringstream config_text(Need(blocks, "config", kTextBlock).payload);
    ArchitectureConfig config = ArchitectureConfig::FromKeyValues(ParseKeyValues(config_text));
    std::istringstream words_text(Need(blocks, "vocab.words", kTextBlock).payload);
    std::istringstream chars_text(Need(blocks, "vocab.chars", kTextBlock).payload);
    TaggerModel model(std::move(schema), config, Vocab::Load(words_text), Vocab::Load(chars_text),
                      0);
    size_t params = 0;
    for (Parameter *p : model.parameters()) {
      const std::string name = kParamPrefix + p->name;
      Tensor value = ParseTensor(name, Need(blocks, name, kTensorBlock).payload);
      if (!value.SameShape(p->value)) throw Corrupt("block " + name + " has the wrong shape");
      p->value = std::move(value);
      ++params;
    }
    if (blocks.size() != params + 5) throw Corrupt("model file holds unexpected blocks");
    return model;
  } catch (const Corrupt &) {
    throw;
  } catch (const Error &e) {
    throw Corrupt(std::string(e.name()) + ": " + e.what());
  }
}

TaggerModel LoadModel(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return LoadModel(in);
}

}  // namespace csner
