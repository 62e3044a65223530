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

#include "hs/text/normalize.hpp"

#include <cstdint>
#include <sstream>
#include <vector>

#include "hs/common/utf8.hpp"

namespace hs::text {
namespace {

constexpr char32_t kQuestion = U'?';        // U+003F
constexpr char32_t kExclamation = U'!';     // U+0021
constexpr char32_t kArabicQuestion = 0x061F;
constexpr char32_t kStar = U'*';

bool is_retained_mark(char32_t cp) {
  return cp == kQuestion || cp == kExclamation || cp == kArabicQuestion;
}

bool is_whitespace(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == U'\f' || cp == U'\v' || cp == 0x00A0;
}

// Punctuation and symbol ranges seen in social media text. Anything this
// misses and that is not an Arabic letter still falls to the
// drop_non_arabic_tokens stage.
bool is_punct_or_symbol(char32_t cp) {
  if (cp < 0x80) {
    bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'A' && cp <= U'Z') ||
                 (cp >= U'a' && cp <= U'z');
    return cp > U' ' && !alnum;
  }
  if (cp >= 0x00A1 && cp <= 0x00BF) return true;  // Latin-1 punct/symbols
  switch (cp) {
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x066A:  // Arabic percent sign
    case 0x066B:  // Arabic decimal separator
    case 0x066C:  // Arabic thousands separator
    case 0x066D:  // Arabic five pointed star
    case 0x06D4:  // Arabic full stop
      return true;
    default:
      break;
  }
  if (cp >= 0x2000 && cp <= 0x206F) return true;  // general punctuation
  if (cp >= 0x2190 && cp <= 0x2BFF) return true;  // arrows, misc symbols
  if (cp >= 0x3000 && cp <= 0x303F) return true;  // CJK punctuation
  if (cp >= 0xFE50 && cp <= 0xFE6F) return true;  // small form variants
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;  // fullwidth punct
  return false;
}

std::vector<char32_t> strip_diacritics_pass(const std::vector<char32_t>& in) {
  std::vector<char32_t> out;
  out.reserve(in.size());
  for (char32_t cp : in) {
    if (!is_arabic_diacritic(cp)) out.push_back(cp);
  }
  return out;
}

std::vector<char32_t> strip_punct_pass(const std::vector<char32_t>& in,
                                       bool preserve_star_runs) {
  std::vector<char32_t> out;
  out.reserve(in.size() + 8);
  std::size_t i = 0;
  while (i < in.size()) {
    char32_t cp = in[i];
    if (is_retained_mark(cp)) {
      // A maximal run of the same mark becomes one standalone token.
      std::size_t j = i;
      while (j < in.size() && in[j] == cp) ++j;
      out.push_back(U' ');
      out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(i),
                 in.begin() + static_cast<std::ptrdiff_t>(j));
      out.push_back(U' ');
      i = j;
      continue;
    }
    if (cp == kStar && preserve_star_runs) {
      out.push_back(cp);
    } else if (!is_punct_or_symbol(cp)) {
      out.push_back(cp);
    }
    ++i;
  }
  return out;
}

std::string encode_and_tidy(const std::vector<char32_t>& cps) {
  return normalize_whitespace(utf8::encode(cps));
}

}  // namespace

bool is_arabic_letter(char32_t cp) {
  return cp >= 0x0621 && cp <= 0x064A && cp != 0x0640;
}

bool is_arabic_diacritic(char32_t cp) {
  if (cp >= 0x064B && cp <= 0x065F) return true;  // tashkeel
  if (cp >= 0x0610 && cp <= 0x061A) return true;  // honorific signs
  if (cp >= 0x06D6 && cp <= 0x06ED) return true;  // Quranic annotations
  return cp == 0x0670 || cp == 0x0640;            // superscript alef, tatweel
}

std::string normalize_letters(const std::string& text) {
  std::vector<char32_t> cps = utf8::decode(text);
  for (char32_t& cp : cps) {
    switch (cp) {
      case 0x0622:  // alef with madda
      case 0x0623:  // alef with hamza above
      case 0x0625:  // alef with hamza below
        cp = 0x0627;
        break;
      case 0x0629:  // ta marbuta -> ha
        cp = 0x0647;
        break;
      case 0x0649:  // alef maqsura -> ya
        cp = 0x064A;
        break;
      default:
        break;
    }
  }
  return utf8::encode(cps);
}

std::string strip_diacritics_and_punct(const std::string& text,
                                       bool preserve_star_runs) {
  std::vector<char32_t> cps = utf8::decode(text);
  cps = strip_diacritics_pass(cps);
  cps = strip_punct_pass(cps, preserve_star_runs);
  return encode_and_tidy(cps);
}

std::string collapse_repeats(const std::string& text,
                             bool preserve_star_runs) {
  std::vector<char32_t> in = utf8::decode(text);
  std::vector<char32_t> out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    std::size_t j = i;
    while (j < in.size() && in[j] == in[i]) ++j;
    std::size_t run = j - i;
    if (in[i] == kStar && preserve_star_runs) {
      out.insert(out.end(), run, in[i]);
    } else if (run >= 3) {
      out.push_back(in[i]);
    } else {
      out.insert(out.end(), run, in[i]);
    }
    i = j;
  }
  return utf8::encode(out);
}

std::string drop_non_arabic_tokens(const std::string& text,
                                   bool preserve_star_runs) {
  std::istringstream stream(text);
  std::string token;
  std::string out;
  while (stream >> token) {
    std::vector<char32_t> cps = utf8::decode(token);
    bool all_star = !cps.empty();
    bool ok = !cps.empty();
    for (char32_t cp : cps) {
      if (cp != kStar) all_star = false;
      if (!is_arabic_letter(cp) && !is_retained_mark(cp)) ok = false;
    }
    if (ok || (all_star && preserve_star_runs)) {
      if (!out.empty()) out.push_back(' ');
      out += token;
    }
  }
  return out;
}

std::string normalize_whitespace(const std::string& text) {
  std::vector<char32_t> in = utf8::decode(text);
  std::vector<char32_t> out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t cp : in) {
    if (is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  return utf8::encode(out);
}

std::string preprocess(const std::string& text,
                       const NormalizationConfig& cfg) {
  std::string s = text;
  if (cfg.normalize_letters) s = normalize_letters(s);
  if (cfg.strip_diacritics) {
    s = utf8::encode(strip_diacritics_pass(utf8::decode(s)));
  }
  if (cfg.strip_punct_keep_q_excl) {
    s = utf8::encode(
        strip_punct_pass(utf8::decode(s), cfg.preserve_star_runs));
  }
  if (cfg.collapse_repeats) s = collapse_repeats(s, cfg.preserve_star_runs);
  if (cfg.drop_non_arabic_tokens) {
    s = drop_non_arabic_tokens(s, cfg.preserve_star_runs);
  }
  return normalize_whitespace(s);
}

}  // namespace hs::text
