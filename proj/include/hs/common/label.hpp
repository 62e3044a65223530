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

#include "hs/common/error.hpp"

namespace hs {

enum class Label { kOffensive, kNotOffensive };

inline std::string to_string(Label l) {
  return l == Label::kOffensive ? "OFF" : "NOT";
}

inline Label label_from_string(const std::string& s) {
  if (s == "OFF") return Label::kOffensive;
  if (s == "NOT") return Label::kNotOffensive;
  throw DataError("FormatError: unknown label '" + s + "'");
}

}  // namespace hs
