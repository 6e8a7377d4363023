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

#ifndef CSNER_CORPUS_H_
#define CSNER_CORPUS_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csner/schema.h"

namespace csner {

enum class Part { kTitle, kAbstract };

const char *PartName(Part part);
// Accepts "title" or "abstract"; throws BadConfig otherwise.
Part ParsePart(std::string_view name);

struct Token {
  std::string surface;
  Tag tag;

  friend bool operator==(const Token &, const Token &) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string source;
  Part part = Part::kTitle;

  int size() const { return static_cast<int>(tokens.size()); }
  std::vector<std::string> surfaces() const;
  std::vector<Tag> tags() const;
  std::vector<EntitySpan> spans(bool repair = true) const;

  friend bool operator==(const Sentence &, const Sentence &) = default;
};

struct Corpus {
  LabelSchema schema = LabelSchema::Canonical();
  std::vector<Sentence> sentences;

  size_t size() const { return sentences.size(); }
};

// Splits on whitespace, then peels leading and trailing ASCII punctuation
// off each chunk as single-character tokens. Inner punctuation such as the
// hyphens of "state-of-the-art" stays attached.
std::vector<std::string> Tokenize(std::string_view text);

// ASCII lower-casing.
std::string CaseFold(std::string_view text);

// --- CoNLL two-column files ---------------------------------------------
//
// "token<TAB>tag" per line, a blank line between sentences, and an optional
// "#source=<name> #part=<title|abstract>" comment line ahead of a sentence.

// A sentence whose tags have not been mapped onto a schema yet.
struct RawSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  std::string source;
  Part part = Part::kTitle;
};

struct RawCorpus {
  std::vector<RawSentence> sentences;
};

// Throws MalformedLine on a column count other than two, UnknownTag on a tag
// that is not O, B-<label> or I-<label>.
RawCorpus ReadRawConll(std::istream &in);

// Tags must use canonical type names of `schema`. With `repair`, stray I
// tags are rewritten to B; without it they raise InvalidTransition.
Corpus ReadConll(std::istream &in, const LabelSchema &schema, bool repair = true);

void WriteConll(const Corpus &corpus, std::ostream &out);

// --- Merging ---------------------------------------------------------------

struct MergeOptions {
  // Folded labels dropped from every source.
  std::set<std::string> excluded;
  // Folded labels dropped only from sentences of the named source.
  std::map<std::string, std::set<std::string>> excluded_by_source;

  // Metric-like and untyped labels everywhere; method annotations from
  // SciERC; dataset annotations from PwC.
  static MergeOptions Default();
  bool Excludes(const std::string &source, const std::string &folded) const;
};

struct MergeStats {
  size_t input_sentences = 0;
  size_t duplicates = 0;
  size_t dropped_spans = 0;
  std::map<std::string, size_t> dropped_by_label;
  std::map<std::string, size_t> sentences_by_source;
};

// Concatenates the parts in order, mapping every label through the schema's
// alias table. Sentences whose (part, token sequence) was already seen are
// skipped. Throws UnknownLabel for a label that is neither excluded nor
// known to the schema.
Corpus MergeCorpora(std::span<const RawCorpus> parts, const LabelSchema &schema,
                    const MergeOptions &options = MergeOptions::Default(),
                    MergeStats *stats = nullptr);

// --- Distance labeling ---------------------------------------------------

class Lexicon {
 public:
  // Phrases are tokenized and case-folded. A phrase added twice keeps the
  // type it was first given.
  void Add(std::string_view phrase, int type);

  // "phrase<TAB>label" lines; labels go through schema.NormalizeLabel.
  static Lexicon Load(std::istream &in, const LabelSchema &schema);

  size_t size() const { return entries_.size(); }
  int max_tokens() const { return max_tokens_; }

  // Type of the folded, space-joined token sequence, or -1.
  int Find(const std::string &folded_phrase) const;

  const std::unordered_map<std::string, int> &entries() const { return entries_; }

 private:
  std::unordered_map<std::string, int> entries_;
  int max_tokens_ = 0;
};

// Tags every lexicon phrase occurring in the tokenized text at token
// boundaries, ignoring case. Candidates are accepted longest first, then
// leftmost first, skipping any that overlap an accepted one.
Sentence DistanceLabel(std::string_view text, const Lexicon &lexicon,
                       std::string source = "", Part part = Part::kTitle);

// --- Selection and splitting ---------------------------------------------

struct CountRange {
  int min = 0;
  int max = 0;
  bool Contains(int n) const { return n >= min && n <= max; }
};

// A sentence falls into the group when its research-problem and method
// mention counts are both in range.
struct SelectionGroup {
  std::string name;
  CountRange problems;
  CountRange methods;
};

std::vector<SelectionGroup> TitleSelectionGroups();
std::vector<SelectionGroup> AbstractSelectionGroups();

// Assigns each sentence to the first group it satisfies and samples up to
// caps[g] of group g uniformly without replacement. Output keeps corpus order.
// `group_sizes`, when given, receives the selected count per group.
Corpus StratifySelect(const Corpus &corpus, std::span<const SelectionGroup> groups,
                      std::span<const size_t> caps, uint64_t seed,
                      std::vector<size_t> *group_sizes = nullptr);

struct Splits {
  Corpus train;
  Corpus dev;
  Corpus test;
};

// Seeded shuffle, then sizes by largest remainder so every part is within
// one sentence of its exact share. Throws BadRatios unless the three ratios
// are positive and sum to 1.
Splits SplitCorpus(const Corpus &corpus, std::array<double, 3> ratios,
                   uint64_t seed);

}  // namespace csner

#endif  // CSNER_CORPUS_H_
