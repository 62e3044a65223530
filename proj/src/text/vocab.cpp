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

#include "hs/text/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hs/common/error.hpp"

namespace hs::text {
namespace {

const std::string kPad = "[pad]";
const std::string kUnk = "[unk]";
const std::string kStart = "[start]";
const std::string kEnd = "[end]";

}  // namespace

const std::string& Vocabulary::pad_token() { return kPad; }
const std::string& Vocabulary::unk_token() { return kUnk; }
const std::string& Vocabulary::start_token() { return kStart; }
const std::string& Vocabulary::end_token() { return kEnd; }

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPad || tokens[1] != kUnk) {
    throw ValueError(
        "MissingSpecials: vocabulary must start with [pad] and [unk]");
  }
  Vocabulary v;
  v.has_start_end_ =
      tokens.size() >= 4 && tokens[2] == kStart && tokens[3] == kEnd;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto [it, inserted] = v.index_.emplace(tokens[i], static_cast<int>(i));
    if (!inserted) {
      throw ValueError("DuplicateToken: '" + tokens[i] +
                       "' appears more than once");
    }
  }
  v.list_ = std::move(tokens);
  v.tokens_ = v.list_.size();
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(const std::string& token) const {
  return index_.find(token) != index_.end();
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw ValueError("IdOutOfRange: id " + std::to_string(id) +
                     " not in [0, " + std::to_string(size()) + ")");
  }
  return list_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("FileNotFound: cannot open '" + path + "' for writing");
  }
  for (const std::string& tok : list_) out << tok << '\n';
  if (!out) throw DataError("WriteFailed: error writing '" + path + "'");
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound: cannot open '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    tokens.push_back(line);
  }
  if (tokens.size() < 2) {
    throw DataError("FormatError: vocabulary file '" + path +
                    "' has fewer than two tokens");
  }
  try {
    return from_tokens(std::move(tokens));
  } catch (const ValueError& e) {
    throw DataError("FormatError: '" + path + "': " + e.what());
  }
}

Vocabulary build_word_vocab(const std::vector<std::string>& corpus,
                            std::size_t max_size,
                            Vocabulary::Specials specials) {
  std::size_t special_count =
      specials == Vocabulary::Specials::kFull ? 4u : 2u;
  if (max_size < special_count + 1) {
    throw ValueError("VocabTooSmall: max_size " + std::to_string(max_size) +
                     " leaves no room beyond the " +
                     std::to_string(special_count) + " special tokens");
  }

  std::unordered_map<std::string, std::size_t> freq;
  std::unordered_map<std::string, std::size_t> first_seen;
  std::size_t position = 0;
  for (const std::string& text : corpus) {
    std::istringstream stream(text);
    std::string tok;
    while (stream >> tok) {
      auto [it, inserted] = first_seen.emplace(tok, position++);
      (void)it;
      if (!inserted) ++position;
      ++freq[tok];
    }
  }
  if (freq.empty()) {
    throw ValueError("EmptyCorpus: no tokens found while building vocabulary");
  }

  struct Entry {
    std::string token;
    std::size_t count;
    std::size_t first;
  };
  std::vector<Entry> entries;
  entries.reserve(freq.size());
  for (auto& [tok, count] : freq) {
    entries.push_back({tok, count, first_seen[tok]});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });

  std::vector<std::string> tokens = {kPad, kUnk};
  if (specials == Vocabulary::Specials::kFull) {
    tokens.push_back(kStart);
    tokens.push_back(kEnd);
  }
  for (const Entry& e : entries) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(e.token);
  }
  return Vocabulary::from_tokens(std::move(tokens));
}

std::vector<int> encode(const std::string& text, const Vocabulary& vocab,
                        std::size_t max_len) {
  if (max_len == 0) throw ValueError("BadLength: max_len must be positive");
  std::vector<int> ids;
  ids.reserve(max_len);
  std::istringstream stream(text);
  std::string tok;
  while (ids.size() < max_len && stream >> tok) {
    ids.push_back(vocab.id(tok));
  }
  ids.resize(max_len, Vocabulary::kPadId);
  return ids;
}

std::string decode(const std::vector<int>& ids, const Vocabulary& vocab) {
  std::string out;
  for (int id : ids) {
    const std::string& tok = vocab.token(id);
    if (id == Vocabulary::kPadId) continue;
    if (vocab.has_start_end() &&
        (id == Vocabulary::kStartId || id == Vocabulary::kEndId)) {
      continue;
    }
    // [unk] stays visible so decoded text is honest about lost tokens.
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

}  // namespace hs::text
