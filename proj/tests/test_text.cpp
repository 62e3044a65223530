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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "hs/common/error.hpp"
#include "hs/common/rng.hpp"
#include "hs/common/utf8.hpp"
#include "hs/text/normalize.hpp"
#include "hs/text/vocab.hpp"
#include "hs/text/wordpiece.hpp"

using hs::text::NormalizationConfig;
using hs::text::Vocabulary;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hstoolkit_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("letter normalization maps variant forms") {
  CHECK(hs::text::normalize_letters("أحمد") == "احمد");
  CHECK(hs::text::normalize_letters("إلى") == "الي");
  CHECK(hs::text::normalize_letters("آمل") == "امل");
  CHECK(hs::text::normalize_letters("مدرسة") == "مدرسه");
  CHECK(hs::text::normalize_letters("مستشفى") == "مستشفي");
  // Latin text passes through untouched.
  CHECK(hs::text::normalize_letters("abc") == "abc");
}

TEST_CASE("diacritics and tatweel are stripped") {
  CHECK(hs::text::preprocess("مُحَمَّد") == "محمد");
  CHECK(hs::text::preprocess("فـــرح") == "فرح");
}

TEST_CASE("question and exclamation marks become standalone tokens") {
  CHECK(hs::text::preprocess("كيف؟!") == "كيف ؟ !");
  CHECK(hs::text::preprocess("لا!") == "لا !");
  // A run of one mark collapses to a single token, not one per character.
  CHECK(hs::text::preprocess("أناااا هنا!!!!") == "انا هنا !");
  CHECK(hs::text::preprocess("؟؟؟") == "؟");
}

TEST_CASE("repeated letters collapse only at length three or more") {
  CHECK(hs::text::preprocess("الله") == "الله");   // doubled lam survives
  CHECK(hs::text::preprocess("جمييييل") == "جميل");
}

TEST_CASE("non-arabic tokens are dropped") {
  CHECK(hs::text::preprocess("انظر http://x.co هنا") == "انظر هنا");
  CHECK(hs::text::preprocess("رائع 😂😂") == "رائع");
  CHECK(hs::text::preprocess("hello انت 123") == "انت");
  // A token that mixes scripts goes away whole.
  CHECK(hs::text::preprocess("abcكلمة") == "");
}

TEST_CASE("star runs survive only when preserved") {
  NormalizationConfig keep;
  keep.preserve_star_runs = true;
  CHECK(hs::text::preprocess("انت ***", keep) == "انت ***");
  CHECK(hs::text::preprocess("انت ***") == "انت");
  // Preserved stars must not be collapsed; run length encodes word length.
  CHECK(hs::text::preprocess("قال *****", keep) == "قال *****");
}

TEST_CASE("whitespace normalization collapses runs and trims") {
  CHECK(hs::text::normalize_whitespace("  ا\t\nب  ") == "ا ب");
  CHECK(hs::text::normalize_whitespace("") == "");
  CHECK(hs::text::normalize_whitespace("   ") == "");
}

TEST_CASE("preprocess is idempotent over random input") {
  // Pool mixes Arabic letters, diacritics, variant forms, Latin, digits,
  // marks, emoji and whitespace so every pipeline stage gets exercised.
  const std::vector<char32_t> pool = {
      0x0627, 0x0628, 0x062A, 0x0644, 0x0645, 0x0646, 0x0647, 0x064A,
      0x0623, 0x0625, 0x0622, 0x0629, 0x0649, 0x0640, 0x064B, 0x0651,
      'a',    'z',    '0',    '9',    '?',    '!',    0x061F, '*',
      '.',    ',',    '#',    '@',    0x1F602, ' ',   ' ',    '\t'};
  hs::Rng rng(20260816);
  int mismatches = 0;
  std::string first_bad;
  for (int iter = 0; iter < 10000; ++iter) {
    std::vector<char32_t> cps;
    const std::size_t len = rng.below(24);
    cps.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
      cps.push_back(pool[rng.below(pool.size())]);
    const std::string s = hs::utf8::encode(cps);
    const std::string once = hs::text::preprocess(s);
    const std::string twice = hs::text::preprocess(once);
    if (once != twice) {
      if (mismatches == 0) first_bad = s;
      ++mismatches;
    }
  }
  CHECK_MESSAGE(mismatches == 0, "first non-idempotent input: ", first_bad);
}

TEST_CASE("preprocess is idempotent with star preservation") {
  NormalizationConfig keep;
  keep.preserve_star_runs = true;
  hs::Rng rng(77);
  const std::vector<char32_t> pool = {0x0627, 0x0628, 0x062C, '*', '*',
                                      '!',    '?',    ' ',    ' '};
  for (int iter = 0; iter < 2000; ++iter) {
    std::vector<char32_t> cps;
    const std::size_t len = rng.below(16);
    for (std::size_t i = 0; i < len; ++i)
      cps.push_back(pool[rng.below(pool.size())]);
    const std::string s = hs::utf8::encode(cps);
    const std::string once = hs::text::preprocess(s, keep);
    REQUIRE(hs::text::preprocess(once, keep) == once);
  }
}

TEST_CASE("word vocabulary layout and ranking") {
  Vocabulary v = hs::text::build_word_vocab({"ا ا ب"}, 6);
  REQUIRE(v.size() == 6);
  CHECK(v.token(0) == "[pad]");
  CHECK(v.token(1) == "[unk]");
  CHECK(v.token(2) == "[start]");
  CHECK(v.token(3) == "[end]");
  CHECK(v.token(4) == "ا");
  CHECK(v.token(5) == "ب");
  CHECK(v.has_start_end());
  CHECK(v.id("ا") == 4);
  CHECK(v.id("ج") == Vocabulary::kUnkId);
  CHECK_THROWS_AS((void)v.token(6), hs::ValueError);
  CHECK_THROWS_AS((void)v.token(-1), hs::ValueError);
}

TEST_CASE("vocabulary frequency ties break toward first occurrence") {
  Vocabulary v = hs::text::build_word_vocab({"ب ا ب", "ج ا"}, 7);
  CHECK(v.token(4) == "ب");  // count 2, seen first
  CHECK(v.token(5) == "ا");  // count 2, seen second
  CHECK(v.token(6) == "ج");
}

TEST_CASE("vocabulary size cap keeps the most frequent words") {
  Vocabulary v = hs::text::build_word_vocab({"ب ا ب", "ج ا"}, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.token(4) == "ب");
  CHECK(v.id("ج") == Vocabulary::kUnkId);
}

TEST_CASE("vocabulary construction errors") {
  CHECK_THROWS_AS(hs::text::build_word_vocab({"ا"}, 4), hs::ValueError);
  CHECK_THROWS_AS(hs::text::build_word_vocab(
                      {"ا"}, 2, Vocabulary::Specials::kBasic),
                  hs::ValueError);
  CHECK_THROWS_AS(hs::text::build_word_vocab({}, 10), hs::ValueError);
  CHECK_THROWS_AS(hs::text::build_word_vocab({"", "   "}, 10),
                  hs::ValueError);
  CHECK_THROWS_AS(Vocabulary::from_tokens({"ا", "ب"}), hs::ValueError);
  CHECK_THROWS_AS(
      Vocabulary::from_tokens({"[pad]", "[unk]", "ا", "ا"}),
      hs::ValueError);
}

TEST_CASE("basic vocabularies have no start or end") {
  Vocabulary v = hs::text::build_word_vocab({"ا"}, 3,
                                            Vocabulary::Specials::kBasic);
  REQUIRE(v.size() == 3);
  CHECK_FALSE(v.has_start_end());
  CHECK(v.token(2) == "ا");
  // Id 2 is an ordinary token here and must stay visible in decode.
  CHECK(hs::text::decode({2}, v) == "ا");
}

TEST_CASE("encode truncates, pads and maps unknowns") {
  Vocabulary v = hs::text::build_word_vocab({"ا ب"}, 6);
  CHECK(hs::text::encode("ا ج ب", v, 5) ==
        std::vector<int>{4, 1, 5, 0, 0});
  CHECK(hs::text::encode("ا ب ا", v, 2) == std::vector<int>{4, 5});
  CHECK(hs::text::encode("", v, 3) == std::vector<int>{0, 0, 0});
  CHECK_THROWS_AS(hs::text::encode("ا", v, 0), hs::ValueError);
}

TEST_CASE("decode drops structural specials but keeps unk") {
  Vocabulary v = hs::text::build_word_vocab({"ا ب"}, 6);
  CHECK(hs::text::decode({2, 4, 1, 5, 3, 0, 0}, v) == "ا [unk] ب");
  CHECK(hs::text::decode({0, 0}, v) == "");
  CHECK_THROWS_AS(hs::text::decode({99}, v), hs::ValueError);
}

TEST_CASE("vocabulary survives a save/load round trip") {
  Vocabulary v = hs::text::build_word_vocab({"ب ا ب", "ج ا"}, 7);
  const std::string path = temp_path("vocab_roundtrip.txt");
  v.save(path);
  Vocabulary r = Vocabulary::load(path);
  CHECK(r.token_list() == v.token_list());
  CHECK(r.has_start_end() == v.has_start_end());
  CHECK(r.id("ج") == v.id("ج"));
  CHECK_THROWS_AS(Vocabulary::load(temp_path("missing_vocab.txt")),
                  hs::DataError);
}

TEST_CASE("wordpiece training merges the most frequent pair") {
  // One word "ababab": the merge chain is forced, so the final model
  // carries every intermediate piece and tokenizes the word whole.
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ababab"}, 8);
  REQUIRE(m.pieces.size() == 8);
  CHECK(m.has_piece("a"));
  CHECK(m.has_piece("##a"));
  CHECK(m.has_piece("b"));
  CHECK(m.has_piece("##b"));
  CHECK(m.has_piece("##ab"));
  CHECK(m.has_piece("##abab"));
  CHECK(m.has_piece("##babab"));
  CHECK(m.has_piece("ababab"));
  CHECK(hs::text::wordpiece_tokenize("ababab", m) ==
        std::vector<std::string>{"ababab"});
}

TEST_CASE("wordpiece stops merging at the piece budget") {
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ababab"}, 7);
  REQUIRE(m.pieces.size() == 7);
  CHECK_FALSE(m.has_piece("ababab"));
  CHECK(hs::text::wordpiece_tokenize("ababab", m) ==
        std::vector<std::string>{"a", "##babab"});
}

TEST_CASE("wordpiece segments unseen words over the alphabet") {
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ababab"}, 8);
  CHECK(hs::text::wordpiece_tokenize("ba", m) ==
        std::vector<std::string>{"b", "##a"});
  CHECK(hs::text::wordpiece_tokenize("a", m) ==
        std::vector<std::string>{"a"});
}

TEST_CASE("wordpiece merge ties break lexicographically") {
  // "ab" and "cd" tie at frequency 1; ("a","##b") sorts before ("c","##d").
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ab", "cd"}, 9);
  CHECK(m.has_piece("ab"));
  CHECK_FALSE(m.has_piece("cd"));
}

TEST_CASE("wordpiece tokenization errors") {
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ababab"}, 8);
  CHECK_THROWS_AS(hs::text::wordpiece_tokenize("", m), hs::ValueError);
  CHECK_THROWS_AS(hs::text::wordpiece_tokenize("xa", m), hs::ValueError);
  const std::string long_word(m.max_word_chars + 1, 'a');
  CHECK_THROWS_AS(hs::text::wordpiece_tokenize(long_word, m),
                  hs::ValueError);
}

TEST_CASE("wordpiece training errors") {
  CHECK_THROWS_AS(hs::text::train_wordpiece({"ababab"}, 3), hs::ValueError);
  CHECK_THROWS_AS(hs::text::train_wordpiece({}, 10), hs::ValueError);
}

TEST_CASE("wordpiece model survives a save/load round trip") {
  hs::text::WordPieceModel m = hs::text::train_wordpiece({"ababab"}, 8);
  const std::string path = temp_path("wordpiece_roundtrip.txt");
  m.save(path);
  hs::text::WordPieceModel r = hs::text::WordPieceModel::load(path);
  CHECK(r.pieces == m.pieces);
  CHECK(r.continuation_prefix == m.continuation_prefix);
  CHECK(hs::text::wordpiece_tokenize("ba", r) ==
        hs::text::wordpiece_tokenize("ba", m));
}

TEST_CASE("wordpiece handles arabic text") {
  hs::text::WordPieceModel m =
      hs::text::train_wordpiece({"كلب كلب كلاب"}, 20);
  const auto pieces = hs::text::wordpiece_tokenize("كلب", m);
  std::string joined;
  for (const auto& p : pieces) {
    joined += p.size() >= 2 && p.compare(0, 2, "##") == 0 ? p.substr(2) : p;
  }
  CHECK(joined == "كلب");
}
