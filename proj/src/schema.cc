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

#include "csner/schema.h"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

#include "csner/error.h"

namespace csner {
namespace {

bool IsCanonicalName(std::string_view name) {
  if (name.empty() || name.front() == '-' || name.back() == '-') return false;
  char prev = 0;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    if (!ok || (c == '-' && prev == '-')) return false;
    prev = c;
  }
  return true;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string FoldLabel(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (c == '-' || c == '_' || std::isspace(u)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

LabelSchema LabelSchema::Canonical() {
  // Rows 1-7 of the related-work mapping table. Metric and score are not
  // part of the inventory.
  return LabelSchema(
      {"research-problem", "method", "solution", "tool", "resource", "dataset",
       "language"},
      {{"domain", "research-problem"},
       {"application", "research-problem"},
       {"task", "research-problem"},
       {"research problem", "research-problem"},
       {"technique", "method"},
       {"technology and method", "method"},
       {"method", "method"},
       {"focus", "solution"},
       {"solution", "solution"},
       {"tool and library", "tool"},
       {"tool", "tool"},
       {"language resource", "resource"},
       {"resource", "resource"},
       {"language resource product", "dataset"},
       {"dataset", "dataset"},
       {"language", "language"}});
}

LabelSchema::LabelSchema(
    std::vector<std::string> types,
    const std::vector<std::pair<std::string, std::string>> &aliases)
    : types_(std::move(types)) {
  for (size_t i = 0; i < types_.size(); ++i) {
    if (!IsCanonicalName(types_[i])) {
      throw BadConfig("type name '" + types_[i] +
                      "' is not lowercase hyphen-joined");
    }
    if (!index_.emplace(types_[i], static_cast<int>(i)).second) {
      throw BadConfig("duplicate type name '" + types_[i] + "'");
    }
    aliases_[FoldLabel(types_[i])] = static_cast<int>(i);
  }
  for (const auto &[alias, target] : aliases) {
    int type = FindType(target);
    if (type < 0) throw UnknownLabel("alias target '" + target + "'");
    std::string key = FoldLabel(alias);
    if (key.empty()) throw BadConfig("empty alias");
    aliases_[key] = type;
  }
}

LabelSchema LabelSchema::Load(std::istream &types, std::istream *aliases) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(types, line)) {
    std::string name = Trim(line);
    if (!name.empty() && name[0] != '#') names.push_back(name);
  }
  std::vector<std::pair<std::string, std::string>> pairs;
  if (aliases != nullptr) {
    int lineno = 0;
    while (std::getline(*aliases, line)) {
      ++lineno;
      if (Trim(line).empty() || line[0] == '#') continue;
      size_t tab = line.find('\t');
      if (tab == std::string::npos || line.find('\t', tab + 1) != line.npos) {
        throw MalformedLine("alias line " + std::to_string(lineno) +
                            " needs exactly one TAB");
      }
      pairs.emplace_back(Trim(line.substr(0, tab)), Trim(line.substr(tab + 1)));
    }
  }
  return LabelSchema(std::move(names), pairs);
}

void LabelSchema::SaveTypes(std::ostream &out) const {
  for (const auto &t : types_) out << t << '\n';
}

void LabelSchema::SaveAliases(std::ostream &out) const {
  for (const auto &[alias, type] : aliases_) {
    out << alias << '\t' << types_[type] << '\n';
  }
}

int LabelSchema::FindType(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

int LabelSchema::NormalizeLabel(std::string_view raw) const {
  std::string key = FoldLabel(raw);
  if (key.empty()) throw UnknownLabel("empty label");
  auto it = aliases_.find(key);
  if (it == aliases_.end()) throw UnknownLabel("'" + std::string(raw) + "'");
  return it->second;
}

bool LabelSchema::IsKnownLabel(std::string_view raw) const {
  return aliases_.count(FoldLabel(raw)) > 0;
}

std::vector<std::pair<std::string, std::string>> LabelSchema::aliases() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &[alias, type] : aliases_) out.emplace_back(alias, types_[type]);
  return out;
}

std::string LabelSchema::TagString(Tag tag) const {
  switch (tag.kind) {
    case TagKind::kOutside:
      return "O";
    case TagKind::kBegin:
      return "B-" + type_name(tag.type);
    case TagKind::kInside:
      return "I-" + type_name(tag.type);
  }
  return "O";
}

Tag LabelSchema::ParseTag(std::string_view text) const {
  if (text == "O") return Tag::Outside();
  if (text.size() > 2 && text[1] == '-' && (text[0] == 'B' || text[0] == 'I')) {
    int type = FindType(text.substr(2));
    if (type >= 0) return text[0] == 'B' ? Tag::Begin(type) : Tag::Inside(type);
  }
  throw UnknownTag("'" + std::string(text) + "'");
}

int LabelSchema::LabelIndex(Tag tag) const {
  switch (tag.kind) {
    case TagKind::kOutside:
      return 0;
    case TagKind::kBegin:
      return 1 + 2 * tag.type;
    case TagKind::kInside:
      return 2 + 2 * tag.type;
  }
  return 0;
}

Tag LabelSchema::LabelTag(int label) const {
  if (label < 0 || label >= num_labels()) {
    throw OutOfRange("label index " + std::to_string(label));
  }
  if (label == 0) return Tag::Outside();
  int type = (label - 1) / 2;
  return (label - 1) % 2 == 0 ? Tag::Begin(type) : Tag::Inside(type);
}

std::vector<Tag> EncodeBio(std::span<const EntitySpan> spans, int length) {
  if (length < 0) throw OutOfRange("negative length");
  std::vector<Tag> tags(length);
  std::vector<bool> used(length, false);
  for (const auto &s : spans) {
    if (s.start < 0 || s.start >= s.end || s.end > length) {
      throw OutOfRange("span [" + std::to_string(s.start) + "," +
                       std::to_string(s.end) + ") in length " +
                       std::to_string(length));
    }
    for (int i = s.start; i < s.end; ++i) {
      if (used[i]) {
        throw OverlapError("spans overlap at token " + std::to_string(i));
      }
      used[i] = true;
      tags[i] = i == s.start ? Tag::Begin(s.type) : Tag::Inside(s.type);
    }
  }
  return tags;
}

std::vector<EntitySpan> DecodeBio(std::span<const Tag> tags, bool repair) {
  std::vector<EntitySpan> spans;
  bool open = false;
  const int n = static_cast<int>(tags.size());
  for (int i = 0; i < n; ++i) {
    const Tag &tag = tags[i];
    if (tag.kind == TagKind::kInside && open && spans.back().type == tag.type) {
      spans.back().end = i + 1;
      continue;
    }
    if (tag.kind == TagKind::kInside && !repair) {
      throw InvalidTransition("stray I tag at token " + std::to_string(i));
    }
    open = !tag.outside();
    if (open) spans.push_back({tag.type, i, i + 1});
  }
  return spans;
}

}  // namespace csner
