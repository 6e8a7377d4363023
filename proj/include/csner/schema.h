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

#ifndef CSNER_SCHEMA_H_
#define CSNER_SCHEMA_H_

#include <compare>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace csner {

enum class TagKind : unsigned char { kOutside, kBegin, kInside };

// One BIO tag. `type` indexes the owning LabelSchema and is -1 for O.
struct Tag {
  TagKind kind = TagKind::kOutside;
  int type = -1;

  static Tag Outside() { return {}; }
  static Tag Begin(int type) { return {TagKind::kBegin, type}; }
  static Tag Inside(int type) { return {TagKind::kInside, type}; }

  bool outside() const { return kind == TagKind::kOutside; }
  friend bool operator==(const Tag &, const Tag &) = default;
};

// Typed half-open token range [start, end).
struct EntitySpan {
  int type = 0;
  int start = 0;
  int end = 0;

  int length() const { return end - start; }
  friend bool operator==(const EntitySpan &, const EntitySpan &) = default;
  friend auto operator<=>(const EntitySpan &, const EntitySpan &) = default;
};

// The entity-type inventory with its alias table. Immutable once built.
//
// Label indices used by the CRF are laid out as O = 0, B-k = 1 + 2k and
// I-k = 2 + 2k, so the tag-set size is 2 * num_types() + 1.
class LabelSchema {
 public:
  // The seven contribution-centric types with their related-work aliases.
  static LabelSchema Canonical();

  // Throws UnknownLabel if an alias targets a type that is not registered,
  // BadConfig if a type name is not lowercase hyphen-joined or repeats.
  LabelSchema(std::vector<std::string> types,
              const std::vector<std::pair<std::string, std::string>> &aliases);

  // Plain-text forms: one type per line, and "alias<TAB>canonical" lines.
  static LabelSchema Load(std::istream &types, std::istream *aliases);
  void SaveTypes(std::ostream &out) const;
  void SaveAliases(std::ostream &out) const;

  int num_types() const { return static_cast<int>(types_.size()); }
  int num_labels() const { return 2 * num_types() + 1; }
  const std::vector<std::string> &types() const { return types_; }
  const std::string &type_name(int type) const { return types_.at(type); }

  // Index of a canonical type name, or -1.
  int FindType(std::string_view name) const;

  // Case-insensitive alias lookup. Hyphens, underscores and runs of spaces
  // are treated alike, so "Research_Problem" resolves like "research problem".
  int NormalizeLabel(std::string_view raw) const;
  bool IsKnownLabel(std::string_view raw) const;

  // Alias table as (folded alias, canonical name), sorted by alias.
  std::vector<std::pair<std::string, std::string>> aliases() const;

  std::string TagString(Tag tag) const;
  // Parses "O", "B-<type>" or "I-<type>" with a canonical type name.
  Tag ParseTag(std::string_view text) const;

  int LabelIndex(Tag tag) const;
  Tag LabelTag(int label) const;

  friend bool operator==(const LabelSchema &a, const LabelSchema &b) {
    return a.types_ == b.types_ && a.aliases_ == b.aliases_;
  }

 private:
  std::vector<std::string> types_;
  std::map<std::string, int, std::less<>> index_;
  std::map<std::string, int, std::less<>> aliases_;
};

// Folds a raw label to its alias-table key.
std::string FoldLabel(std::string_view raw);

// Throws OverlapError for overlapping spans, OutOfRange for spans outside
// [0, length) or with start >= end.
std::vector<Tag> EncodeBio(std::span<const EntitySpan> spans, int length);

// With `repair` a stray I-t (not continuing a span of type t) opens a new
// span; without it the sequence is rejected with InvalidTransition.
std::vector<EntitySpan> DecodeBio(std::span<const Tag> tags, bool repair);

}  // namespace csner

#endif  // CSNER_SCHEMA_H_
