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
#include <utility>
#include <vector>

#include "hs/nn/layers.hpp"
#include "hs/nn/tensor.hpp"

namespace hs::nn {

// Single-file binary checkpoint: magic "HSCKPT01", a length-prefixed JSON
// manifest (architecture, hyperparameters, vocab contents), then named f64
// tensors. Little-endian throughout; save → load round-trips bit-exactly.
// No timestamps or environment data, so equal runs write equal bytes.
inline constexpr char kCheckpointMagic[8] = {'H', 'S', 'C', 'K',
                                             'P', 'T', '0', '1'};

struct CheckpointData {
  std::string manifest_json;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const std::string& manifest_json,
                     const std::vector<ParamPtr>& params);

CheckpointData load_checkpoint(const std::string& path);

// Copies tensors into same-named parameters; every parameter must be
// present with a matching shape.
void restore_parameters(const CheckpointData& ckpt,
                        const std::vector<ParamPtr>& params);

}  // namespace hs::nn
