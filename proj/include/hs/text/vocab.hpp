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
#include <string>
#include <unordered_map>
#include <vector>

namespace hs::text {

// Token table with reserved specials at fixed ids. Basic vocabularies carry
// [pad]/[unk] only; full ones add [start]/[end] for sequence generation.
class Vocabulary {
 public:
  enum class Specials { kBasic, kFull };

  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr int kStartId = 2;
  static constexpr int kEndId = 3;

  static const std::string& pad_token();    // "[pad]"
  static const std::string& unk_token();    // "[unk]"
  static const std::string& start_token();  // "[start]"
  static const std::string& end_token();    // "[end]"

  Vocabulary() = default;

  // tokens[0..] must begin with the special prefix for one of the two
  // layouts; duplicates anywhere are rejected.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // Unknown tokens map to kUnkId.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const;

  // Throws ValueError when id is outside [0, size()).
  const std::string& token(int id) const;

  int size() const { return static_cast<int>(tokens_); }
  std::size_t token_count() const { return tokens_; }
  bool has_start_end() const { return has_start_end_; }
  const std::vector<std::string>& token_list() const { return list_; }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> list_;
  std::unordered_map<std::string, int> index_;
  std::size_t tokens_ = 0;
  bool has_start_end_ = false;
};

// Frequency-ranked word vocabulary over whitespace tokens, capped at
// max_size entries including specials. Ties break toward the token seen
// first in corpus order.
Vocabulary build_word_vocab(const std::vector<std::string>& corpus,
                            std::size_t max_size,
                            Vocabulary::Specials specials =
                                Vocabulary::Specials::kFull);

// Whitespace-tokenizes, maps through the vocabulary (unknown -> [unk]),
// truncates to max_len and right-pads with [pad].
std::vector<int> encode(const std::string& text, const Vocabulary& vocab,
                        std::size_t max_len);

// Inverse of encode up to padding: specials are omitted, remaining tokens
// joined by single spaces. Out-of-range ids throw ValueError.
std::string decode(const std::vector<int>& ids, const Vocabulary& vocab);

}  // namespace hs::text
