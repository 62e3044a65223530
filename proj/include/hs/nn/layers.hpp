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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hs/common/rng.hpp"
#include "hs/nn/graph.hpp"
#include "hs/nn/tensor.hpp"

namespace hs::nn {

// Persistent trainable state. The node is a graph leaf reused across steps:
// its value is the weight and its grad accumulates during backward.
struct Parameter {
  std::string name;
  NodePtr node;
  bool is_weight_matrix = false;  // L2 penalty applies to these only
  bool trainable = true;

  Tensor& value() { return node->value; }
  const Tensor& value() const { return node->value; }
  Tensor& grad() { return node->ensure_grad(); }
  void zero_grad();
};

using ParamPtr = std::shared_ptr<Parameter>;

class ParameterStore {
 public:
  // Throws ValueError on duplicate names; names key checkpoints.
  ParamPtr create(const std::string& name, Tensor init,
                  bool is_weight_matrix);
  const std::vector<ParamPtr>& all() const { return params_; }
  ParamPtr find(const std::string& name) const;  // nullptr when absent
  void zero_grads();
  std::size_t parameter_count() const;  // total scalar count

 private:
  std::vector<ParamPtr> params_;
};

Tensor glorot_uniform(std::vector<std::size_t> shape, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng);
Tensor uniform_init(std::vector<std::size_t> shape, double lo, double hi,
                    Rng& rng);

enum class Activation { kNone, kRelu, kSigmoid, kTanh };
enum class Direction { kForward, kBidirectional };

NodePtr apply_activation(const NodePtr& x, Activation act);

class Dense {
 public:
  Dense(ParameterStore& store, Rng& rng, const std::string& name,
        std::size_t in_dim, std::size_t out_dim,
        Activation act = Activation::kNone);
  // x [B×in] or [B×L×in].
  NodePtr forward(const NodePtr& x) const;

  const ParamPtr& weight() const { return w_; }
  const ParamPtr& bias() const { return b_; }

 private:
  ParamPtr w_;
  ParamPtr b_;
  Activation act_;
};

class Conv1dLayer {
 public:
  Conv1dLayer(ParameterStore& store, Rng& rng, const std::string& name,
              std::size_t kernel, std::size_t in_ch, std::size_t filters,
              Activation act = Activation::kRelu);
  // x [L×C] or [B×L×C].
  NodePtr forward(const NodePtr& x) const;

 private:
  ParamPtr w_;
  ParamPtr b_;
  Activation act_;
};

class Embedding {
 public:
  Embedding(ParameterStore& store, Rng& rng, const std::string& name,
            std::size_t vocab, std::size_t dim, bool freeze_pad = false);
  NodePtr forward(const std::vector<std::vector<int>>& ids) const;
  NodePtr forward(const std::vector<int>& ids) const;
  const ParamPtr& table() const { return table_; }

 private:
  ParamPtr table_;
  bool freeze_pad_;
};

// Learned position table added to token embeddings. Gradient reaches only
// the rows a batch actually uses.
class PositionalEmbedding {
 public:
  PositionalEmbedding(ParameterStore& store, Rng& rng,
                      const std::string& name, std::size_t max_len,
                      std::size_t dim);
  // x [L×D] or [B×L×D] with L <= max_len.
  NodePtr forward(const NodePtr& x) const;
  const ParamPtr& table() const { return table_; }

 private:
  ParamPtr table_;
  std::size_t max_len_;
  std::size_t dim_;
};

// Single-direction LSTM over gate order (input, forget, candidate, output).
// Forget-gate bias initialized to 1 so early training does not erase state.
class LstmLayer {
 public:
  LstmLayer(ParameterStore& store, Rng& rng, const std::string& name,
            std::size_t input_dim, std::size_t units);
  // x [B×L×D] or [L×D]. return_sequences selects [..×L×H] vs final [..×H].
  NodePtr forward(const NodePtr& x, bool return_sequences) const;
  std::size_t units() const { return units_; }

 private:
  ParamPtr wx_;  // [D×4H]
  ParamPtr wh_;  // [H×4H]
  ParamPtr b_;   // [4H]
  std::size_t units_;
};

// Direction wrapper; bidirectional runs a second cell over the reversed
// sequence and concatenates on the feature axis.
class Lstm {
 public:
  Lstm(ParameterStore& store, Rng& rng, const std::string& name,
       std::size_t input_dim, std::size_t units, Direction direction);
  NodePtr forward(const NodePtr& x, bool return_sequences) const;
  std::size_t output_dim() const;

 private:
  LstmLayer forward_;
  std::optional<LstmLayer> backward_;
};

// Scaled dot-product attention core: softmax(q·kᵀ/√d)·v. mask may be null.
NodePtr scaled_dot_attention(const NodePtr& q, const NodePtr& k,
                             const NodePtr& v, const Tensor* mask);

class MultiHeadAttention {
 public:
  // Throws ShapeError DimNotDivisible unless heads divides model_dim.
  MultiHeadAttention(ParameterStore& store, Rng& rng, const std::string& name,
                     std::size_t model_dim, std::size_t heads);
  // q [B×Lq×D], k/v [B×Lk×D]; mask [Lq×Lk] or [B×Lq×Lk], may be null.
  NodePtr forward(const NodePtr& q, const NodePtr& k, const NodePtr& v,
                  const Tensor* mask) const;

 private:
  ParamPtr wq_, wk_, wv_, wo_;
  ParamPtr bq_, bk_, bv_, bo_;
  std::size_t heads_;
  std::size_t model_dim_;
  std::size_t head_dim_;
};

class LayerNormLayer {
 public:
  LayerNormLayer(ParameterStore& store, const std::string& name,
                 std::size_t dim, double epsilon = 1e-5);
  NodePtr forward(const NodePtr& x) const;

 private:
  ParamPtr gamma_;
  ParamPtr beta_;
  double epsilon_;
};

// lambda · Σ‖w‖² over trainable weight matrices; biases and norm affines
// never contribute.
NodePtr l2_penalty(const std::vector<ParamPtr>& params, double lambda);

}  // namespace hs::nn
