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

#include <cstdint>
#include <string>

#include "hs/nn/tensor.hpp"
#include "hs/text/vocab.hpp"

namespace hs::detect {

struct EmbeddingLoad {
  nn::Tensor table;  // [V x dim], row i belongs to vocab token i
  std::size_t found = 0;
  std::size_t missing = 0;

  double coverage() const {
    const std::size_t total = found + missing;
    return total == 0 ? 0.0
                      : static_cast<double>(found) /
                            static_cast<double>(total);
  }
};

// word2vec text format: an optional `count dim` header line, then
// `word v1 ... v_dim` per line. Rows for in-vocab words are copied; the pad
// row stays zero and every other absent word draws from N(0, 0.01) under
// `seed`. Throws ShapeError DimensionMismatch when the file dimension
// disagrees with `dim` and DataError on unparseable lines.
EmbeddingLoad load_pretrained_embeddings(const std::string& path,
                                         const text::Vocabulary& vocab,
                                         std::size_t dim, std::uint64_t seed);

}  // namespace hs::detect
