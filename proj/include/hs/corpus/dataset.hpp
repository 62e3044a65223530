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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hs/common/error.hpp"
#include "hs/common/label.hpp"
#include "hs/common/rng.hpp"
#include "hs/text/normalize.hpp"

namespace hs::corpus {

struct LabeledExample {
  std::string id;
  std::string text;
  Label label = Label::kNotOffensive;
};

// source is the raw sentence, target the same sentence with each offensive
// word replaced by a '*' run of equal character count.
struct ParallelPair {
  std::string source;
  std::string target;
};

template <typename T>
struct Bundle {
  std::vector<T> train;
  std::vector<T> dev;
  std::vector<T> test;
  std::string origin;
};

using LabeledBundle = Bundle<LabeledExample>;
using ParallelBundle = Bundle<ParallelPair>;

struct LineError {
  std::size_t line_no = 0;  // 1-based
  std::string message;
};

template <typename T>
struct LoadResult {
  std::vector<T> items;
  std::vector<LineError> errors;
};

// Format: `<id>\t<text>\t<OFF|NOT>` per line. Malformed lines land in
// errors instead of being dropped silently.
LoadResult<LabeledExample> load_labeled_tsv(const std::string& path);
void save_labeled_tsv(const std::vector<LabeledExample>& examples,
                      const std::string& path);

// Format: `<source>\t<target>` per line. Pairs failing validate_pair are
// reported with their line numbers and excluded from items.
LoadResult<ParallelPair> load_parallel(const std::string& path);
void save_parallel(const std::vector<ParallelPair>& pairs,
                   const std::string& path);

struct PairValidation {
  bool ok = true;
  std::string reason;  // empty when ok

  explicit operator bool() const { return ok; }
};

// Checks token-count equality and, per position, target token equal to the
// source token or a '*' run matching its character count. Reports the first
// violation only.
PairValidation validate_pair(const ParallelPair& pair);

// Offensive-word list. Words are normalized on insertion so lookups against
// preprocessed text are consistent.
class Lexicon {
 public:
  // Normalizes word before storing. Throws ValueError when the normalized
  // form is empty or spans multiple tokens.
  void add(const std::string& word, const std::string& category = "offensive");

  bool contains(const std::string& token) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  // Format: `<word>\t<category>` per line.
  void save(const std::string& path) const;
  static Lexicon load(const std::string& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::string> words_;  // parallel to entries_, insertion order
};

// Replaces every token found in the lexicon by a '*' run of equal character
// count. The rule-based oracle the neural masker is measured against.
std::string mask_with_lexicon(const std::string& text, const Lexicon& lexicon);

struct SplitSpec {
  std::size_t train = 0;
  std::size_t dev = 0;
  std::size_t test = 0;

  std::size_t total() const { return train + dev + test; }
};

// Deterministic shuffle under seed, then disjoint slices of the requested
// sizes. Throws ValueError InsufficientData when they exceed the input.
template <typename T>
Bundle<T> split_dataset(const std::vector<T>& examples, const SplitSpec& spec,
                        std::uint64_t seed) {
  if (spec.total() > examples.size()) {
    throw ValueError("InsufficientData: split spec needs " +
                     std::to_string(spec.total()) + " examples but only " +
                     std::to_string(examples.size()) + " are available");
  }
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  Bundle<T> bundle;
  std::size_t pos = 0;
  auto take = [&](std::vector<T>& out, std::size_t count) {
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(examples[order[pos++]]);
  };
  take(bundle.train, spec.train);
  take(bundle.dev, spec.dev);
  take(bundle.test, spec.test);
  return bundle;
}

struct ClassCounts {
  std::size_t offensive = 0;
  std::size_t not_offensive = 0;

  std::size_t total() const { return offensive + not_offensive; }
  // Majority over minority; 0 when a class is empty.
  double imbalance_ratio() const;
};

struct DistributionReport {
  ClassCounts train;
  ClassCounts dev;
  ClassCounts test;
  ClassCounts overall;
};

DistributionReport class_distribution(const LabeledBundle& bundle);
ClassCounts count_classes(const std::vector<LabeledExample>& examples);

// Applies the normalization pipeline to every example and drops those whose
// text comes back empty; `dropped` records how many.
struct PreprocessedExamples {
  std::vector<LabeledExample> examples;
  std::size_t dropped = 0;
};
PreprocessedExamples preprocess_examples(
    const std::vector<LabeledExample>& examples,
    const text::NormalizationConfig& cfg = {});

// Same for parallel pairs; the target side keeps '*' runs. Pairs whose
// preprocessed sides no longer validate are dropped and counted.
struct PreprocessedPairs {
  std::vector<ParallelPair> pairs;
  std::size_t dropped = 0;
};
PreprocessedPairs preprocess_pairs(const std::vector<ParallelPair>& pairs,
                                   const text::NormalizationConfig& cfg = {});

struct SyntheticCorpus {
  LabeledBundle labeled;
  ParallelBundle parallel;
  Lexicon lexicon;
};

// Random sentences over a generated Arabic-letter vocabulary. A sentence is
// Offensive iff it contains a lexicon word; targets come from
// mask_with_lexicon, so every pair validates by construction. Byte-identical
// output for equal arguments.
SyntheticCorpus generate_synthetic_corpus(std::size_t n,
                                          std::size_t lexicon_size,
                                          std::size_t vocab_size,
                                          std::uint64_t seed);

}  // namespace hs::corpus
