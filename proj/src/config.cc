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

#include "csner/config.h"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "csner/error.h"

namespace csner {
namespace {

std::string Trim(const std::string &s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

template <typename T>
void ParseNumber(const KeyValues &kv, const std::string &key, T &out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  const std::string &v = it->second;
  T parsed{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw BadConfig("cannot parse " + key + "=" + v);
  }
  out = parsed;
}

}  // namespace

KeyValues ParseKeyValues(std::istream &in) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw BadConfig("line " + std::to_string(lineno) + " is not key=value");
    }
    kv[Trim(t.substr(0, eq))] = Trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues ReadKeyValuesFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ParseKeyValues(in);
}

void WriteKeyValues(const KeyValues &values, std::ostream &out) {
  for (const auto &[k, v] : values) out << k << '=' << v << '\n';
}

void ReadInt(const KeyValues &kv, const std::string &key, int &out) {
  ParseNumber(kv, key, out);
}

void ReadUint64(const KeyValues &kv, const std::string &key, uint64_t &out) {
  ParseNumber(kv, key, out);
}

void ReadDouble(const KeyValues &kv, const std::string &key, double &out) {
  ParseNumber(kv, key, out);
}

void ReadBool(const KeyValues &kv, const std::string &key, bool &out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  const std::string &v = it->second;
  if (v == "true" || v == "1" || v == "yes") {
    out = true;
  } else if (v == "false" || v == "0" || v == "no") {
    out = false;
  } else {
    throw BadConfig("cannot parse " + key + "=" + v + " as a flag");
  }
}

void ReadString(const KeyValues &kv, const std::string &key, std::string &out) {
  auto it = kv.find(key);
  if (it != kv.end()) out = it->second;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace csner
