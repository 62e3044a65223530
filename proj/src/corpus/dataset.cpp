// Copyright 2026 The hstoolkit Authors
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

#include "hs/corpus/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "hs/common/utf8.hpp"

namespace hs::corpus {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream stream(text);
  std::string tok;
  while (stream >> tok) tokens.push_back(tok);
  return tokens;
}

// Raw tabs and newlines would corrupt the TSV framing.
std::string sanitize_field(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound: cannot open '" + path + "'");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("FileNotFound: cannot open '" + path + "' for writing");
  }
  return out;
}

bool is_star_run(const std::vector<char32_t>& cps) {
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(),
                     [](char32_t cp) { return cp == U'*'; });
}

}  // namespace

LoadResult<LabeledExample> load_labeled_tsv(const std::string& path) {
  std::ifstream in = open_for_read(path);
  LoadResult<LabeledExample> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 3) {
      result.errors.push_back(
          {line_no, "FormatError: expected 3 tab-separated fields, got " +
                        std::to_string(fields.size())});
      continue;
    }
    try {
      result.items.push_back(
          {fields[0], fields[1], label_from_string(fields[2])});
    } catch (const Error& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

void save_labeled_tsv(const std::vector<LabeledExample>& examples,
                      const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const LabeledExample& ex : examples) {
    out << sanitize_field(ex.id) << '\t' << sanitize_field(ex.text) << '\t'
        << to_string(ex.label) << '\n';
  }
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

LoadResult<ParallelPair> load_parallel(const std::string& path) {
  std::ifstream in = open_for_read(path);
  LoadResult<ParallelPair> result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 2) {
      result.errors.push_back(
          {line_no, "FormatError: expected 2 tab-separated fields, got " +
                        std::to_string(fields.size())});
      continue;
    }
    ParallelPair pair{fields[0], fields[1]};
    PairValidation check = validate_pair(pair);
    if (!check) {
      result.errors.push_back(
          {line_no, "PairInvariantViolation: " + check.reason});
      continue;
    }
    result.items.push_back(std::move(pair));
  }
  return result;
}

void save_parallel(const std::vector<ParallelPair>& pairs,
                   const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const ParallelPair& pair : pairs) {
    out << sanitize_field(pair.source) << '\t' << sanitize_field(pair.target)
        << '\n';
  }
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

PairValidation validate_pair(const ParallelPair& pair) {
  std::vector<std::string> src = whitespace_tokens(pair.source);
  std::vector<std::string> tgt = whitespace_tokens(pair.target);
  if (src.size() != tgt.size()) {
    return {false, "token counts differ (" + std::to_string(src.size()) +
                       " vs " + std::to_string(tgt.size()) + ")"};
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i] == tgt[i]) continue;
    std::vector<char32_t> tgt_cps = utf8::decode(tgt[i]);
    if (!is_star_run(tgt_cps)) {
      return {false, "token " + std::to_string(i) +
                         " differs from source and is not a star run"};
    }
    std::size_t want = utf8::length(src[i]);
    if (tgt_cps.size() != want) {
      return {false, "token " + std::to_string(i) + " has " +
                         std::to_string(tgt_cps.size()) + " stars for a " +
                         std::to_string(want) + "-character word"};
    }
  }
  return {};
}

double ClassCounts::imbalance_ratio() const {
  std::size_t hi = std::max(offensive, not_offensive);
  std::size_t lo = std::min(offensive, not_offensive);
  if (lo == 0) return 0.0;
  return static_cast<double>(hi) / static_cast<double>(lo);
}

ClassCounts count_classes(const std::vector<LabeledExample>& examples) {
  ClassCounts counts;
  for (const LabeledExample& ex : examples) {
    if (ex.label == Label::kOffensive) {
      ++counts.offensive;
    } else {
      ++counts.not_offensive;
    }
  }
  return counts;
}

DistributionReport class_distribution(const LabeledBundle& bundle) {
  DistributionReport report;
  report.train = count_classes(bundle.train);
  report.dev = count_classes(bundle.dev);
  report.test = count_classes(bundle.test);
  report.overall.offensive = report.train.offensive + report.dev.offensive +
                             report.test.offensive;
  report.overall.not_offensive = report.train.not_offensive +
                                 report.dev.not_offensive +
                                 report.test.not_offensive;
  return report;
}

void Lexicon::add(const std::string& word, const std::string& category) {
  std::string normalized = text::preprocess(word);
  if (normalized.empty()) {
    throw ValueError("EmptyWord: '" + word +
                     "' normalizes to nothing and cannot join the lexicon");
  }
  if (normalized.find(' ') != std::string::npos) {
    throw ValueError("MultiTokenWord: '" + word +
                     "' normalizes to more than one token");
  }
  if (contains(normalized)) return;
  entries_.emplace_back(normalized, category);
  words_.push_back(normalized);
}

bool Lexicon::contains(const std::string& token) const {
  return std::find(words_.begin(), words_.end(), token) != words_.end();
}

void Lexicon::save(const std::string& path) const {
  std::ofstream out = open_for_write(path);
  for (const auto& [word, category] : entries_) {
    out << word << '\t' << category << '\n';
  }
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in = open_for_read(path);
  Lexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    if (fields.empty() || fields.size() > 2) {
      throw DataError("FormatError: '" + path + "' line " +
                      std::to_string(line_no) + " is not `word<TAB>category`");
    }
    try {
      lexicon.add(fields[0], fields.size() == 2 ? fields[1] : "offensive");
    } catch (const ValueError& e) {
      throw DataError("FormatError: '" + path + "' line " +
                      std::to_string(line_no) + ": " + e.what());
    }
  }
  return lexicon;
}

std::string mask_with_lexicon(const std::string& text, const Lexicon& lexicon) {
  std::vector<std::string> tokens = whitespace_tokens(text);
  std::string out;
  for (const std::string& tok : tokens) {
    if (!out.empty()) out.push_back(' ');
    if (lexicon.contains(tok)) {
      out.append(utf8::length(tok), '*');
    } else {
      out += tok;
    }
  }
  return out;
}

PreprocessedExamples preprocess_examples(
    const std::vector<LabeledExample>& examples,
    const text::NormalizationConfig& cfg) {
  PreprocessedExamples result;
  result.examples.reserve(examples.size());
  for (const LabeledExample& ex : examples) {
    std::string cleaned = text::preprocess(ex.text, cfg);
    if (cleaned.empty()) {
      ++result.dropped;
      continue;
    }
    result.examples.push_back({ex.id, std::move(cleaned), ex.label});
  }
  return result;
}

PreprocessedPairs preprocess_pairs(const std::vector<ParallelPair>& pairs,
                                   const text::NormalizationConfig& cfg) {
  text::NormalizationConfig target_cfg = cfg;
  target_cfg.preserve_star_runs = true;
  PreprocessedPairs result;
  result.pairs.reserve(pairs.size());
  for (const ParallelPair& pair : pairs) {
    ParallelPair cleaned{text::preprocess(pair.source, cfg),
                         text::preprocess(pair.target, target_cfg)};
    if (cleaned.source.empty() || !validate_pair(cleaned)) {
      ++result.dropped;
      continue;
    }
    result.pairs.push_back(std::move(cleaned));
  }
  return result;
}

SyntheticCorpus generate_synthetic_corpus(std::size_t n,
                                          std::size_t lexicon_size,
                                          std::size_t vocab_size,
                                          std::uint64_t seed) {
  if (n == 0 || lexicon_size == 0 || vocab_size == 0) {
    throw ValueError("BadSize: n, lexicon_size and vocab_size must be >= 1");
  }
  if (lexicon_size > vocab_size) {
    throw ValueError("BadSize: lexicon_size " + std::to_string(lexicon_size) +
                     " exceeds vocab_size " + std::to_string(vocab_size));
  }

  // Letters drawn from the normalized alphabet only, so every generated
  // sentence is a fixed point of preprocess.
  static const std::vector<std::string> kLetters = {
      "ا", "ب", "ت", "ث", "ج", "ح", "خ", "د", "ذ", "ر", "ز", "س", "ش", "ص",
      "ض", "ط", "ظ", "ع", "غ", "ف", "ق", "ك", "ل", "م", "ن", "ه", "و", "ي"};

  Rng rng(seed);
  std::set<std::string> seen;
  std::vector<std::string> vocab;
  vocab.reserve(vocab_size);
  std::size_t extra_len = 0;
  while (vocab.size() < vocab_size) {
    std::size_t len = 2 + static_cast<std::size_t>(rng.below(5)) + extra_len;
    std::string word;
    std::size_t prev = kLetters.size();
    for (std::size_t k = 0; k < len; ++k) {
      // No immediate repeats, so collapse_repeats cannot alter the word.
      std::size_t pick;
      do {
        pick = static_cast<std::size_t>(rng.below(kLetters.size()));
      } while (pick == prev);
      word += kLetters[pick];
      prev = pick;
    }
    if (seen.insert(word).second) {
      vocab.push_back(std::move(word));
      extra_len = 0;
    } else if (seen.size() % 64 == 0) {
      ++extra_len;  // widens the space if collisions pile up
    }
  }

  std::vector<std::size_t> order(vocab.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  SyntheticCorpus corpus;
  for (std::size_t i = 0; i < lexicon_size; ++i) {
    corpus.lexicon.add(vocab[order[i]]);
  }

  std::vector<LabeledExample> examples;
  std::vector<ParallelPair> pairs;
  examples.reserve(n);
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t len = 3 + static_cast<std::size_t>(rng.below(8));
    std::string sentence;
    bool offensive = false;
    for (std::size_t k = 0; k < len; ++k) {
      const std::string& word =
          vocab[static_cast<std::size_t>(rng.below(vocab.size()))];
      if (!sentence.empty()) sentence.push_back(' ');
      sentence += word;
      if (corpus.lexicon.contains(word)) offensive = true;
    }
    std::string masked = mask_with_lexicon(sentence, corpus.lexicon);
    examples.push_back({"synth-" + std::to_string(i), sentence,
                        offensive ? Label::kOffensive
                                  : Label::kNotOffensive});
    pairs.push_back({std::move(sentence), std::move(masked)});
  }

  std::size_t dev = n / 10;
  std::size_t test = n / 10;
  SplitSpec sizes{n - dev - test, dev, test};
  std::uint64_t split_seed = rng.next_u64();
  corpus.labeled = split_dataset(examples, sizes, split_seed);
  corpus.parallel = split_dataset(pairs, sizes, split_seed);
  std::string tag = "synthetic(n=" + std::to_string(n) +
                    ",lexicon=" + std::to_string(lexicon_size) +
                    ",vocab=" + std::to_string(vocab_size) +
                    ",seed=" + std::to_string(seed) + ")";
  corpus.labeled.origin = tag;
  corpus.parallel.origin = tag;
  return corpus;
}

}  // namespace hs::corpus
