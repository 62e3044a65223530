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

#include "hs/text/wordpiece.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "hs/common/error.hpp"
#include "hs/common/utf8.hpp"

namespace hs::text {
namespace {

std::string strip_prefix(const std::string& piece, const std::string& prefix) {
  if (piece.size() >= prefix.size() &&
      piece.compare(0, prefix.size(), prefix) == 0) {
    return piece.substr(prefix.size());
  }
  return piece;
}

}  // namespace

void WordPieceModel::rebuild_index() {
  piece_set_.clear();
  piece_set_.insert(pieces.begin(), pieces.end());
}

void WordPieceModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("FileNotFound: cannot open '" + path + "' for writing");
  }
  out << "continuation_prefix=" << continuation_prefix << '\n';
  for (const std::string& piece : pieces) out << piece << '\n';
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

WordPieceModel WordPieceModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) {
    throw DataError("FormatError: '" + path + "' is empty");
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::string key = "continuation_prefix=";
  if (header.compare(0, key.size(), key) != 0) {
    throw DataError("FormatError: '" + path +
                    "' missing continuation_prefix header");
  }
  WordPieceModel model;
  model.continuation_prefix = header.substr(key.size());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) model.pieces.push_back(line);
  }
  if (model.pieces.empty()) {
    throw DataError("FormatError: '" + path + "' has no pieces");
  }
  model.rebuild_index();
  return model;
}

WordPieceModel train_wordpiece(const std::vector<std::string>& corpus,
                               std::size_t vocab_size,
                               const std::string& continuation_prefix) {
  // Words as piece sequences, weighted by occurrence count.
  std::map<std::vector<std::string>, long long> split_words;
  std::map<std::string, long long> word_freq;
  std::vector<std::string> word_order;
  for (const std::string& text : corpus) {
    std::istringstream stream(text);
    std::string tok;
    while (stream >> tok) {
      if (word_freq.find(tok) == word_freq.end()) word_order.push_back(tok);
      ++word_freq[tok];
    }
  }
  if (word_freq.empty()) {
    throw ValueError("EmptyCorpus: no tokens found while training wordpiece");
  }

  // Seed both forms of every character so in-alphabet words never need UNK,
  // regardless of the position a character was observed in.
  std::map<std::string, bool> alphabet;  // ordered for determinism
  for (const auto& [word, count] : word_freq) {
    (void)count;
    for (char32_t cp : utf8::decode(word)) {
      std::string ch = utf8::encode({cp});
      alphabet[ch] = true;
      alphabet[continuation_prefix + ch] = true;
    }
  }
  if (vocab_size < alphabet.size()) {
    throw ValueError("VocabTooSmall: alphabet needs " +
                     std::to_string(alphabet.size()) + " pieces but vocab_size is " +
                     std::to_string(vocab_size));
  }

  WordPieceModel model;
  model.continuation_prefix = continuation_prefix;
  for (const auto& [piece, present] : alphabet) {
    (void)present;
    model.pieces.push_back(piece);
  }

  for (const std::string& word : word_order) {
    std::vector<std::string> split;
    std::vector<char32_t> cps = utf8::decode(word);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      std::string ch = utf8::encode({cps[i]});
      split.push_back(i == 0 ? ch : continuation_prefix + ch);
    }
    split_words[split] += word_freq[word];
  }

  while (model.pieces.size() < vocab_size) {
    // Highest-frequency adjacent pair; ties break to the lexicographically
    // smallest pair, which keeps training deterministic.
    std::map<std::pair<std::string, std::string>, long long> pair_freq;
    for (const auto& [split, count] : split_words) {
      for (std::size_t i = 0; i + 1 < split.size(); ++i) {
        pair_freq[{split[i], split[i + 1]}] += count;
      }
    }
    if (pair_freq.empty()) break;
    std::pair<std::string, std::string> best;
    long long best_count = 0;
    for (const auto& [pair, count] : pair_freq) {
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }

    std::string merged =
        best.first + strip_prefix(best.second, continuation_prefix);
    std::map<std::vector<std::string>, long long> next;
    for (const auto& [split, count] : split_words) {
      std::vector<std::string> out;
      out.reserve(split.size());
      std::size_t i = 0;
      while (i < split.size()) {
        if (i + 1 < split.size() && split[i] == best.first &&
            split[i + 1] == best.second) {
          out.push_back(merged);
          i += 2;
        } else {
          out.push_back(split[i]);
          ++i;
        }
      }
      next[out] += count;
    }
    split_words = std::move(next);
    if (std::find(model.pieces.begin(), model.pieces.end(), merged) ==
        model.pieces.end()) {
      model.pieces.push_back(merged);
    }
  }

  model.rebuild_index();
  return model;
}

std::vector<std::string> wordpiece_tokenize(const std::string& word,
                                            const WordPieceModel& model) {
  if (word.empty()) {
    throw ValueError("EmptyWord: cannot tokenize an empty word");
  }
  std::vector<char32_t> cps = utf8::decode(word);
  if (cps.size() > model.max_word_chars) {
    throw ValueError("WordTooLong: " + std::to_string(cps.size()) +
                     " characters exceeds limit of " +
                     std::to_string(model.max_word_chars));
  }
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < cps.size()) {
    std::size_t end = cps.size();
    std::string match;
    while (end > pos) {
      std::string cand = utf8::encode(std::vector<char32_t>(
          cps.begin() + static_cast<std::ptrdiff_t>(pos),
          cps.begin() + static_cast<std::ptrdiff_t>(end)));
      if (pos > 0) cand = model.continuation_prefix + cand;
      if (model.has_piece(cand)) {
        match = std::move(cand);
        break;
      }
      --end;
    }
    if (match.empty()) {
      throw ValueError("UnknownCharacter: '" +
                       utf8::encode({cps[pos]}) +
                       "' is outside the model alphabet");
    }
    out.push_back(std::move(match));
    pos = end;
  }
  return out;
}

}  // namespace hs::text
