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

#ifndef CSNER_SERIALIZE_H_
#define CSNER_SERIALIZE_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "csner/model.h"

namespace csner {

// Model container:
//   "CSNERMDL" | u32 version | u32 block count | blocks
//   block: u32 name length | name | u8 kind | u64 payload length | payload
// Text blocks hold the schema, architecture config and vocabularies; tensor
// blocks ("param:<name>") hold u32 rows, u32 cols and rows*cols float64.
// Integers and floats are little-endian.
inline constexpr uint32_t kModelFormatVersion = 1;

void SaveModel(const TaggerModel &model, std::ostream &out);
void SaveModel(const TaggerModel &model, const std::string &path);

// Throws VersionMismatch for another format version and Corrupt for a bad
// magic, truncation, missing or misshapen blocks, or non-finite values.
TaggerModel LoadModel(std::istream &in);
TaggerModel LoadModel(const std::string &path);

}  // namespace csner

#endif  // CSNER_SERIALIZE_H_
