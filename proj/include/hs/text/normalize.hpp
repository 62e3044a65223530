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

#include <string>

namespace hs::text {

// Pipeline stages are applied in field order; all flags are independent.
// preserve_star_runs keeps '*' runs intact through every stage, which the
// masked side of a parallel corpus requires.
struct NormalizationConfig {
  bool normalize_letters = true;
  bool strip_diacritics = true;
  bool strip_punct_keep_q_excl = true;
  bool collapse_repeats = true;
  bool drop_non_arabic_tokens = true;
  bool preserve_star_runs = false;
};

// Letters in the basic Arabic block, tatweel excluded.
bool is_arabic_letter(char32_t cp);

// Tashkeel, superscript alef, tatweel and the Quranic annotation marks.
bool is_arabic_diacritic(char32_t cp);

// Maps hamzated/madda alef forms to bare alef, ta-marbuta to ha and
// alef-maqsura to ya. Total on any UTF-8 input.
std::string normalize_letters(const std::string& text);

// Removes diacritics and punctuation. '?', '؟' and '!' are kept; a maximal
// run of the same mark is split out as one standalone token so that a later
// collapse_repeats pass reduces e.g. "!!!!" to a single "!".
// With preserve_star_runs, '*' is not treated as punctuation.
std::string strip_diacritics_and_punct(const std::string& text,
                                       bool preserve_star_runs = false);

// Runs of >= 3 identical code points collapse to one occurrence; shorter
// runs are left alone so legitimate doubled letters survive.
std::string collapse_repeats(const std::string& text,
                             bool preserve_star_runs = false);

// Deletes whitespace tokens containing anything outside Arabic letters and
// the retained '?'/'؟'/'!' marks. Pure-asterisk tokens survive when
// preserve_star_runs is set.
std::string drop_non_arabic_tokens(const std::string& text,
                                   bool preserve_star_runs = false);

// Collapses all whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(const std::string& text);

// Full pipeline per config, then whitespace normalization. Idempotent:
// preprocess(preprocess(x)) == preprocess(x).
std::string preprocess(const std::string& text,
                       const NormalizationConfig& cfg = {});

}  // namespace hs::text
