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

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

namespace hs::metrics {

// Exact rational, kept alongside the float value so reports stay auditable.
struct Fraction {
  long long num = 0;
  long long den = 0;

  double value() const {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  }
};

// Corpus-level cumulative BLEU. bleu[n-1] = BP * exp(sum_{k<=n} ln(p_k)/n),
// defined as 0 whenever any p_k with k <= n is 0 (unsmoothed).
struct BleuReport {
  std::array<double, 4> bleu{{0, 0, 0, 0}};
  std::array<Fraction, 4> precisions{};
  double brevity_penalty = 0.0;
  long long candidate_len = 0;
  long long reference_len = 0;
  // Number of unknown-token emissions; tracked by the decoder that produced
  // the candidates, carried here so one report covers a whole experiment.
  long long unk_count = 0;
};

using TokenizedCorpus = std::vector<std::vector<std::string>>;

std::vector<std::string> whitespace_tokens(const std::string& text);

// Candidate n-gram counts are clipped by the aligned reference's counts,
// then summed corpus-wide. Single-reference setting.
// Throws ValueError on empty or misaligned corpora, or n < 1.
Fraction modified_ngram_precision(const TokenizedCorpus& candidates,
                                  const TokenizedCorpus& references, int n);

// 1 when cand_len >= ref_len, exp(1 - ref_len/cand_len) when shorter,
// 0 when cand_len == 0.
double brevity_penalty(long long cand_len, long long ref_len);

// epsilon_smoothing substitutes 0.1 for zero n-gram match counts; it exists
// for sentence-level diagnostics and is off for all reported numbers.
BleuReport bleu(const TokenizedCorpus& candidates,
                const TokenizedCorpus& references, int max_n = 4,
                bool epsilon_smoothing = false);

nlohmann::json to_json(const BleuReport& report);

}  // namespace hs::metrics
