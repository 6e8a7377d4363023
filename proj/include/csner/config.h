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

#ifndef CSNER_CONFIG_H_
#define CSNER_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace csner {

// Flat "key=value" settings. Blank lines and lines starting with '#' are
// skipped; whitespace around keys and values is trimmed.
using KeyValues = std::map<std::string, std::string>;

KeyValues ParseKeyValues(std::istream &in);
KeyValues ReadKeyValuesFile(const std::string &path);
void WriteKeyValues(const KeyValues &values, std::ostream &out);

// Typed readers; each leaves `out` untouched when the key is absent and
// throws BadConfig when the value does not parse.
void ReadInt(const KeyValues &kv, const std::string &key, int &out);
void ReadUint64(const KeyValues &kv, const std::string &key, uint64_t &out);
void ReadDouble(const KeyValues &kv, const std::string &key, double &out);
void ReadBool(const KeyValues &kv, const std::string &key, bool &out);
void ReadString(const KeyValues &kv, const std::string &key, std::string &out);

// Round-trip exact decimal form of a double.
std::string FormatDouble(double v);

}  // namespace csner

#endif  // CSNER_CONFIG_H_
