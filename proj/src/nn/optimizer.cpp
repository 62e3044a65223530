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

#include "hs/nn/optimizer.hpp"

#include <cmath>

#include "hs/common/error.hpp"

namespace hs::nn {

Adam::Adam(std::vector<ParamPtr> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  if (cfg_.lr <= 0.0 || cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 ||
      cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0 || cfg_.epsilon <= 0.0) {
    throw ValueError("BadOptimizerConfig: lr > 0, betas in [0,1), eps > 0");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const ParamPtr& p : params_) {
    m_.push_back(Tensor::zeros(p->value().shape()));
    v_.push_back(Tensor::zeros(p->value().shape()));
  }
}

void Adam::zero_grads() {
  for (const ParamPtr& p : params_) p->zero_grad();
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Parameter& p = *params_[pi];
    if (!p.trainable) continue;
    Tensor& w = p.value();
    const Tensor& g = p.node->ensure_grad();
    Tensor& m = m_[pi];
    Tensor& v = v_[pi];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
    w.check_finite("adam_step");
  }
}

}  // namespace hs::nn
