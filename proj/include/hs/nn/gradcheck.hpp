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

#include <functional>

#include "hs/nn/graph.hpp"
#include "hs/nn/tensor.hpp"

namespace hs::nn {

// Compares the reverse-mode gradient of a scalar-valued function against
// central differences (f(x+ε) − f(x−ε)) / 2ε, elementwise. Returns the
// worst error: relative where the magnitudes allow it, absolute when both
// gradients are below 1e-6. fn must be deterministic.
double grad_check(const std::function<NodePtr(const NodePtr&)>& fn,
                  const Tensor& x, double eps = 1e-5);

}  // namespace hs::nn
