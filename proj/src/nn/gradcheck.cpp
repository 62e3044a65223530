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

#include "hs/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "hs/common/error.hpp"

namespace hs::nn {

double grad_check(const std::function<NodePtr(const NodePtr&)>& fn,
                  const Tensor& x, double eps) {
  if (eps <= 0.0) throw ValueError("BadEps: eps must be > 0");

  NodePtr probe = leaf(x);
  NodePtr y = fn(probe);
  if (y->value.size() != 1) {
    throw ShapeError("ShapeMismatch: grad_check needs a scalar function, "
                     "got " + y->value.shape_string());
  }
  backward(y);
  Tensor analytic = probe->grad.size() ? probe->grad
                                       : Tensor::zeros(x.shape());

  auto eval = [&fn](const Tensor& point) {
    NodePtr out = fn(constant(point));
    return out->value[0];
  };

  double worst = 0.0;
  Tensor shifted = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = shifted[i];
    shifted[i] = keep + eps;
    const double up = eval(shifted);
    shifted[i] = keep - eps;
    const double down = eval(shifted);
    shifted[i] = keep;
    const double numeric = (up - down) / (2.0 * eps);
    const double ga = analytic[i];
    const double denom = std::max(std::abs(ga), std::abs(numeric));
    const double err =
        denom < 1e-6 ? std::abs(ga - numeric) : std::abs(ga - numeric) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace hs::nn
