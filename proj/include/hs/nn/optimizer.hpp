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
#include <vector>

#include "hs/nn/layers.hpp"
#include "hs/nn/tensor.hpp"

namespace hs::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers are keyed positionally to the
// parameter list given at construction.
class Adam {
 public:
  explicit Adam(std::vector<ParamPtr> params, AdamConfig cfg = {});

  void zero_grads();
  // Applies one update from the gradients currently on the parameters.
  void step();
  std::int64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<ParamPtr> params_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
};

}  // namespace hs::nn
