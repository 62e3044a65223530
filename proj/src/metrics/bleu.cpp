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

#include "hs/metrics/bleu.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "hs/common/error.hpp"

namespace hs::metrics {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, long long>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
    ++counts[gram];
  }
  return counts;
}

void check_aligned(const TokenizedCorpus& candidates,
                   const TokenizedCorpus& references) {
  if (candidates.empty()) throw ValueError("Empty: no candidate sentences");
  if (candidates.size() != references.size()) {
    throw ValueError("LengthMismatch: " + std::to_string(candidates.size()) +
                     " candidates vs " + std::to_string(references.size()) +
                     " references");
  }
}

}  // namespace

Fraction modified_ngram_precision(const TokenizedCorpus& candidates,
                                  const TokenizedCorpus& references, int n) {
  if (n < 1) throw ValueError("ValueError: n-gram order must be >= 1");
  check_aligned(candidates, references);
  Fraction p;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cand_counts = count_ngrams(candidates[i], n);
    const auto ref_counts = count_ngrams(references[i], n);
    for (const auto& [gram, count] : cand_counts) {
      const auto it = ref_counts.find(gram);
      const long long clipped =
          it == ref_counts.end() ? 0 : std::min(count, it->second);
      p.num += clipped;
    }
    const long long positions =
        static_cast<long long>(candidates[i].size()) - n + 1;
    p.den += positions > 0 ? positions : 0;
  }
  return p;
}

double brevity_penalty(long long cand_len, long long ref_len) {
  if (cand_len == 0) return 0.0;
  if (cand_len >= ref_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(cand_len));
}

BleuReport bleu(const TokenizedCorpus& candidates,
                const TokenizedCorpus& references, int max_n,
                bool epsilon_smoothing) {
  if (max_n < 1 || max_n > 4) {
    throw ValueError("ValueError: max_n must be in [1,4]");
  }
  check_aligned(candidates, references);

  BleuReport report;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    report.candidate_len += static_cast<long long>(candidates[i].size());
    report.reference_len += static_cast<long long>(references[i].size());
  }
  report.brevity_penalty =
      brevity_penalty(report.candidate_len, report.reference_len);

  for (int n = 1; n <= max_n; ++n) {
    report.precisions[n - 1] =
        modified_ngram_precision(candidates, references, n);
  }

  for (int n = 1; n <= max_n; ++n) {
    double log_sum = 0.0;
    bool degenerate = false;
    for (int k = 1; k <= n; ++k) {
      const Fraction& p = report.precisions[k - 1];
      double value = p.value();
      if (p.num == 0 && epsilon_smoothing && p.den > 0) {
        value = 0.1 / static_cast<double>(p.den);
      }
      if (value <= 0.0) {
        degenerate = true;
        break;
      }
      log_sum += std::log(value) / n;
    }
    if (degenerate) {
      report.bleu[n - 1] = 0.0;
    } else if (log_sum == 0.0) {
      // Exact 1.0 * BP when every precision is exactly 1.
      report.bleu[n - 1] = report.brevity_penalty;
    } else {
      report.bleu[n - 1] = report.brevity_penalty * std::exp(log_sum);
    }
  }
  return report;
}

nlohmann::json to_json(const BleuReport& r) {
  nlohmann::json precisions = nlohmann::json::array();
  for (const auto& p : r.precisions) {
    precisions.push_back({{"num", p.num}, {"den", p.den}, {"value", p.value()}});
  }
  return nlohmann::json{
      {"bleu1", r.bleu[0]},
      {"bleu2", r.bleu[1]},
      {"bleu3", r.bleu[2]},
      {"bleu4", r.bleu[3]},
      {"precisions", precisions},
      {"brevity_penalty", r.brevity_penalty},
      {"candidate_len", r.candidate_len},
      {"reference_len", r.reference_len},
      {"unk", r.unk_count},
  };
}

}  // namespace hs::metrics
