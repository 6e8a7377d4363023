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

#include "csner/corpus.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "csner/error.h"
#include "csner/random.h"

namespace csner {
namespace {

bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// A raw span carries the label text as written in the source file.
struct RawSpan {
  std::string label;
  int start;
  int end;
};

void CheckRawTag(const std::string &tag, int lineno) {
  if (tag == "O") return;
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') return;
  throw UnknownTag("'" + tag + "' on line " + std::to_string(lineno));
}

std::vector<RawSpan> DecodeRaw(const std::vector<std::string> &tags) {
  std::vector<RawSpan> spans;
  bool open = false;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    const std::string &tag = tags[i];
    if (tag == "O") {
      open = false;
      continue;
    }
    std::string label = tag.substr(2);
    if (tag[0] == 'I' && open && spans.back().label == label) {
      spans.back().end = i + 1;
      continue;
    }
    spans.push_back({std::move(label), i, i + 1});
    open = true;
  }
  return spans;
}

void ParseComment(const std::string &line, RawSentence &sentence) {
  std::istringstream fields(line);
  std::string field;
  while (fields >> field) {
    while (!field.empty() && field[0] == '#') field.erase(0, 1);
    size_t eq = field.find('=');
    if (eq == std::string::npos) continue;
    std::string key = field.substr(0, eq);
    std::string value = field.substr(eq + 1);
    if (key == "source") sentence.source = value;
    if (key == "part") sentence.part = ParsePart(value);
  }
}

std::string DedupKey(const Sentence &s) {
  std::string key = PartName(s.part);
  for (const auto &t : s.tokens) {
    key.push_back('\x1f');
    key += t.surface;
  }
  return key;
}

}  // namespace

const char *PartName(Part part) {
  return part == Part::kTitle ? "title" : "abstract";
}

Part ParsePart(std::string_view name) {
  if (name == "title") return Part::kTitle;
  if (name == "abstract") return Part::kAbstract;
  throw BadConfig("part must be 'title' or 'abstract', got '" +
                  std::string(name) + "'");
}

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<Tag> Sentence::tags() const {
  std::vector<Tag> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(t.tag);
  return out;
}

std::vector<EntitySpan> Sentence::spans(bool repair) const {
  return DecodeBio(tags(), repair);
}

std::string CaseFold(std::string_view text) {
  std::string out(text);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t end = i;
    while (end < text.size() && !IsSpace(text[end])) ++end;
    if (end == i) break;
    std::string_view chunk = text.substr(i, end - i);
    i = end;

    size_t b = 0, e = chunk.size();
    while (b < e && IsPunct(chunk[b])) tokens.emplace_back(1, chunk[b++]);
    size_t core_end = e;
    while (core_end > b && IsPunct(chunk[core_end - 1])) --core_end;
    if (core_end > b) tokens.emplace_back(chunk.substr(b, core_end - b));
    for (size_t k = core_end; k < e; ++k) tokens.emplace_back(1, chunk[k]);
  }
  return tokens;
}

RawCorpus ReadRawConll(std::istream &in) {
  RawCorpus corpus;
  RawSentence current;
  std::string line;
  int lineno = 0;
  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = RawSentence();
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#' && current.tokens.empty()) {
      ParseComment(line, current);
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw MalformedLine("line " + std::to_string(lineno) +
                          " must have exactly two TAB-separated columns");
    }
    std::string surface = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (surface.empty() ||
        std::any_of(surface.begin(), surface.end(), IsSpace)) {
      throw MalformedLine("line " + std::to_string(lineno) +
                          ": token is empty or contains whitespace");
    }
    CheckRawTag(tag, lineno);
    current.tokens.push_back(std::move(surface));
    current.tags.push_back(std::move(tag));
  }
  flush();
  return corpus;
}

Corpus ReadConll(std::istream &in, const LabelSchema &schema, bool repair) {
  RawCorpus raw = ReadRawConll(in);
  Corpus corpus{schema, {}};
  corpus.sentences.reserve(raw.sentences.size());
  for (auto &rs : raw.sentences) {
    Sentence s;
    s.source = std::move(rs.source);
    s.part = rs.part;
    std::vector<Tag> tags;
    tags.reserve(rs.tags.size());
    for (const auto &t : rs.tags) tags.push_back(schema.ParseTag(t));
    tags = EncodeBio(DecodeBio(tags, repair), static_cast<int>(tags.size()));
    for (size_t i = 0; i < tags.size(); ++i) {
      s.tokens.push_back({std::move(rs.tokens[i]), tags[i]});
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

void WriteConll(const Corpus &corpus, std::ostream &out) {
  bool first = true;
  for (const auto &s : corpus.sentences) {
    if (!first) out << '\n';
    first = false;
    if (!s.source.empty() || s.part != Part::kTitle) {
      out << '#';
      if (!s.source.empty()) out << "source=" << s.source << " #";
      out << "part=" << PartName(s.part) << '\n';
    }
    for (const auto &t : s.tokens) {
      out << t.surface << '\t' << corpus.schema.TagString(t.tag) << '\n';
    }
  }
}

MergeOptions MergeOptions::Default() {
  MergeOptions options;
  options.excluded = {"generic",    "material",
                      "metric",     "evaluation metric",
                      "score",      "measures and measurements"};
  options.excluded_by_source["SciERC"] = {"method"};
  options.excluded_by_source["PwC"] = {"dataset"};
  return options;
}

bool MergeOptions::Excludes(const std::string &source,
                            const std::string &folded) const {
  if (excluded.count(folded) > 0) return true;
  auto it = excluded_by_source.find(source);
  return it != excluded_by_source.end() && it->second.count(folded) > 0;
}

Corpus MergeCorpora(std::span<const RawCorpus> parts, const LabelSchema &schema,
                    const MergeOptions &options, MergeStats *stats) {
  MergeStats local;
  MergeStats &st = stats != nullptr ? *stats : local;
  st = MergeStats();

  Corpus merged{schema, {}};
  std::unordered_set<std::string> seen;
  for (const auto &part : parts) {
    for (const auto &rs : part.sentences) {
      ++st.input_sentences;
      Sentence s;
      s.source = rs.source;
      s.part = rs.part;
      std::vector<EntitySpan> kept;
      for (const auto &span : DecodeRaw(rs.tags)) {
        std::string folded = FoldLabel(span.label);
        if (options.Excludes(rs.source, folded)) {
          ++st.dropped_spans;
          ++st.dropped_by_label[folded];
          continue;
        }
        kept.push_back({schema.NormalizeLabel(span.label), span.start, span.end});
      }
      std::vector<Tag> tags = EncodeBio(kept, static_cast<int>(rs.tokens.size()));
      for (size_t i = 0; i < tags.size(); ++i) s.tokens.push_back({rs.tokens[i], tags[i]});
      if (!seen.insert(DedupKey(s)).second) {
        ++st.duplicates;
        continue;
      }
      ++st.sentences_by_source[s.source];
      merged.sentences.push_back(std::move(s));
    }
  }
  return merged;
}

void Lexicon::Add(std::string_view phrase, int type) {
  std::vector<std::string> tokens = Tokenize(phrase);
  if (tokens.empty()) throw BadConfig("empty lexicon phrase");
  std::string key;
  for (const auto &t : tokens) {
    if (!key.empty()) key.push_back(' ');
    key += CaseFold(t);
  }
  entries_.emplace(std::move(key), type);
  max_tokens_ = std::max(max_tokens_, static_cast<int>(tokens.size()));
}

Lexicon Lexicon::Load(std::istream &in, const LabelSchema &schema) {
  Lexicon lexicon;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw MalformedLine("lexicon line " + std::to_string(lineno) +
                          " must be phrase<TAB>type");
    }
    lexicon.Add(line.substr(0, tab), schema.NormalizeLabel(line.substr(tab + 1)));
  }
  return lexicon;
}

int Lexicon::Find(const std::string &folded_phrase) const {
  auto it = entries_.find(folded_phrase);
  return it == entries_.end() ? -1 : it->second;
}

Sentence DistanceLabel(std::string_view text, const Lexicon &lexicon,
                       std::string source, Part part) {
  std::vector<std::string> tokens = Tokenize(text);
  std::vector<std::string> folded;
  folded.reserve(tokens.size());
  for (const auto &t : tokens) folded.push_back(CaseFold(t));

  const int n = static_cast<int>(tokens.size());
  std::vector<EntitySpan> candidates;
  for (int start = 0; start < n; ++start) {
    std::string key;
    for (int end = start + 1; end <= std::min(n, start + lexicon.max_tokens()); ++end) {
      if (end > start + 1) key.push_back(' ');
      key += folded[end - 1];
      int type = lexicon.Find(key);
      if (type >= 0) candidates.push_back({type, start, end});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const EntitySpan &a, const EntitySpan &b) {
                     if (a.length() != b.length()) return a.length() > b.length();
                     return a.start < b.start;
                   });
  std::vector<bool> taken(n, false);
  std::vector<EntitySpan> accepted;
  for (const auto &c : candidates) {
    bool free = true;
    for (int i = c.start; i < c.end && free; ++i) free = !taken[i];
    if (!free) continue;
    for (int i = c.start; i < c.end; ++i) taken[i] = true;
    accepted.push_back(c);
  }

  Sentence s;
  s.source = std::move(source);
  s.part = part;
  std::vector<Tag> tags = EncodeBio(accepted, n);
  for (int i = 0; i < n; ++i) s.tokens.push_back({std::move(tokens[i]), tags[i]});
  return s;
}

std::vector<SelectionGroup> TitleSelectionGroups() {
  return {{"tasks and methods", {1, 3}, {1, 3}},
          {"tasks only", {1, 4}, {0, 0}},
          {"methods only", {0, 0}, {1, 2}}};
}

std::vector<SelectionGroup> AbstractSelectionGroups() {
  return {{"tasks and methods", {1, 5}, {1, 5}},
          {"tasks only", {1, 3}, {0, 0}},
          {"methods only", {0, 0}, {1, 3}}};
}

Corpus StratifySelect(const Corpus &corpus, std::span<const SelectionGroup> groups,
                      std::span<const size_t> caps, uint64_t seed,
                      std::vector<size_t> *group_sizes) {
  if (caps.size() != groups.size()) {
    throw BadConfig("need one cap per selection group");
  }
  const int problem = corpus.schema.FindType("research-problem");
  const int method = corpus.schema.FindType("method");

  std::vector<std::vector<size_t>> members(groups.size());
  for (size_t i = 0; i < corpus.sentences.size(); ++i) {
    int problems = 0, methods = 0;
    for (const auto &span : corpus.sentences[i].spans()) {
      if (span.type == problem) ++problems;
      if (span.type == method) ++methods;
    }
    for (size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].problems.Contains(problems) && groups[g].methods.Contains(methods)) {
        members[g].push_back(i);
        break;
      }
    }
  }

  Rng rng(seed);
  std::vector<size_t> chosen;
  if (group_sizes != nullptr) group_sizes->assign(groups.size(), 0);
  for (size_t g = 0; g < groups.size(); ++g) {
    std::vector<size_t> &m = members[g];
    rng.Shuffle(m);
    m.resize(std::min(m.size(), caps[g]));
    chosen.insert(chosen.end(), m.begin(), m.end());
    if (group_sizes != nullptr) (*group_sizes)[g] = m.size();
  }
  std::sort(chosen.begin(), chosen.end());

  Corpus out{corpus.schema, {}};
  out.sentences.reserve(chosen.size());
  for (size_t i : chosen) out.sentences.push_back(corpus.sentences[i]);
  return out;
}

Splits SplitCorpus(const Corpus &corpus, std::array<double, 3> ratios,
                   uint64_t seed) {
  double sum = 0;
  for (double r : ratios) {
    if (!(r > 0) || !std::isfinite(r)) throw BadRatios("ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw BadRatios("ratios must sum to 1");

  const size_t n = corpus.sentences.size();
  std::array<size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    double exact = ratios[k] * static_cast<double>(n);
    sizes[k] = static_cast<size_t>(std::floor(exact + 1e-9));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];

  std::vector<size_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  Rng rng(seed);
  rng.Shuffle(index);

  Splits splits{{corpus.schema, {}}, {corpus.schema, {}}, {corpus.schema, {}}};
  Corpus *targets[3] = {&splits.train, &splits.dev, &splits.test};
  size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    for (size_t j = 0; j < sizes[k]; ++j) {
      targets[k]->sentences.push_back(corpus.sentences[index[pos++]]);
    }
  }
  return splits;
}

}  // namespace csner
