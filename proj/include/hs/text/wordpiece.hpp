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
#include <unordered_set>
#include <vector>

namespace hs::text {

// Subword model trained by iterative highest-frequency pair merging.
// Word-initial pieces are bare; word-internal pieces carry the continuation
// prefix. Both forms of every observed character are seeded, so any word
// over the training alphabet tokenizes without UNK.
struct WordPieceModel {
  std::vector<std::string> pieces;
  std::string continuation_prefix = "##";
  std::size_t max_word_chars = 100;

  bool has_piece(const std::string& piece) const {
    return piece_set_.count(piece) != 0;
  }
  void rebuild_index();

  void save(const std::string& path) const;
  static WordPieceModel load(const std::string& path);

 private:
  std::unordered_set<std::string> piece_set_;
};

// vocab_size counts pieces (characters plus merges). Throws ValueError
// VocabTooSmall when the corpus alphabet alone exceeds vocab_size, or
// EmptyCorpus when there are no tokens.
WordPieceModel train_wordpiece(const std::vector<std::string>& corpus,
                               std::size_t vocab_size,
                               const std::string& continuation_prefix = "##");

// Greedy longest-match-first segmentation. Throws ValueError
// UnknownCharacter for out-of-alphabet characters and WordTooLong past
// model.max_word_chars; callers map either case to [unk].
std::vector<std::string> wordpiece_tokenize(const std::string& word,
                                            const WordPieceModel& model);

}  // namespace hs::text
