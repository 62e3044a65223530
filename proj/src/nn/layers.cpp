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

#include "hs/nn/layers.hpp"

#include <cmath>
#include <utility>

#include "hs/common/error.hpp"

namespace hs::nn {

void Parameter::zero_grad() {
  Tensor& g = node->ensure_grad();
  g.fill(0.0);
}

ParamPtr ParameterStore::create(const std::string& name, Tensor init,
                                bool is_weight_matrix) {
  if (find(name)) {
    throw ValueError("DuplicateParameter: '" + name + "' already registered");
  }
  auto param = std::make_shared<Parameter>();
  param->name = name;
  param->node = leaf(std::move(init));
  param->is_weight_matrix = is_weight_matrix;
  params_.push_back(param);
  return param;
}

ParamPtr ParameterStore::find(const std::string& name) const {
  for (const ParamPtr& p : params_) {
    if (p->name == name) return p;
  }
  return nullptr;
}

void ParameterStore::zero_grads() {
  for (const ParamPtr& p : params_) p->zero_grad();
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t total = 0;
  for (const ParamPtr& p : params_) total += p->node->value.size();
  return total;
}

Tensor glorot_uniform(std::vector<std::size_t> shape, std::size_t fan_in,
                      std::size_t fan_out, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return uniform_init(std::move(shape), -limit, limit, rng);
}

Tensor uniform_init(std::vector<std::size_t> shape, double lo, double hi,
                    Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

NodePtr apply_activation(const NodePtr& x, Activation act) {
  switch (act) {
    case Activation::kNone:
      return x;
    case Activation::kRelu:
      return relu(x);
    case Activation::kSigmoid:
      return sigmoid(x);
    case Activation::kTanh:
      return tanh_op(x);
  }
  throw ValueError("BadActivation: unknown activation kind");
}

Dense::Dense(ParameterStore& store, Rng& rng, const std::string& name,
             std::size_t in_dim, std::size_t out_dim, Activation act)
    : w_(store.create(name + ".w",
                      glorot_uniform({in_dim, out_dim}, in_dim, out_dim, rng),
                      /*is_weight_matrix=*/true)),
      b_(store.create(name + ".b", Tensor::zeros({out_dim}),
                      /*is_weight_matrix=*/false)),
      act_(act) {}

NodePtr Dense::forward(const NodePtr& x) const {
  return apply_activation(add_broadcast(matmul(x, w_->node), b_->node), act_);
}

Conv1dLayer::Conv1dLayer(ParameterStore& store, Rng& rng,
                         const std::string& name, std::size_t kernel,
                         std::size_t in_ch, std::size_t filters,
                         Activation act)
    : w_(store.create(name + ".w",
                      glorot_uniform({kernel, in_ch, filters},
                                     kernel * in_ch, filters, rng),
                      /*is_weight_matrix=*/true)),
      b_(store.create(name + ".b", Tensor::zeros({filters}),
                      /*is_weight_matrix=*/false)),
      act_(act) {}

NodePtr Conv1dLayer::forward(const NodePtr& x) const {
  return apply_activation(conv1d(x, w_->node, b_->node), act_);
}

Embedding::Embedding(ParameterStore& store, Rng& rng, const std::string& name,
                     std::size_t vocab, std::size_t dim, bool freeze_pad)
    : table_(store.create(name + ".table",
                          uniform_init({vocab, dim}, -0.05, 0.05, rng),
                          /*is_weight_matrix=*/true)),
      freeze_pad_(freeze_pad) {}

NodePtr Embedding::forward(const std::vector<std::vector<int>>& ids) const {
  return embedding_lookup(ids, table_->node, freeze_pad_);
}

NodePtr Embedding::forward(const std::vector<int>& ids) const {
  return embedding_lookup(ids, table_->node, freeze_pad_);
}

PositionalEmbedding::PositionalEmbedding(ParameterStore& store, Rng& rng,
                                         const std::string& name,
                                         std::size_t max_len, std::size_t dim)
    : table_(store.create(name + ".table",
                          uniform_init({max_len, dim}, -0.05, 0.05, rng),
                          /*is_weight_matrix=*/true)),
      max_len_(max_len),
      dim_(dim) {}

NodePtr PositionalEmbedding::forward(const NodePtr& x) const {
  const Tensor& xv = x->value;
  if (xv.rank() != 2 && xv.rank() != 3) {
    throw ShapeError("ShapeMismatch: positional embedding wants rank 2 or 3, "
                     "got " + xv.shape_string());
  }
  const std::size_t len = xv.rank() == 3 ? xv.dim(1) : xv.dim(0);
  const std::size_t dim = xv.shape().back();
  if (dim != dim_) {
    throw ShapeError("ShapeMismatch: positional dim " + std::to_string(dim_) +
                     " vs input " + std::to_string(dim));
  }
  if (len > max_len_) {
    throw ShapeError("ShapeMismatch: sequence length " + std::to_string(len) +
                     " exceeds positional table " + std::to_string(max_len_));
  }
  return add_broadcast(x, slice_rows(table_->node, 0, len));
}

LstmLayer::LstmLayer(ParameterStore& store, Rng& rng, const std::string& name,
                     std::size_t input_dim, std::size_t units)
    : wx_(store.create(name + ".wx",
                       glorot_uniform({input_dim, 4 * units}, input_dim,
                                      4 * units, rng),
                       /*is_weight_matrix=*/true)),
      wh_(store.create(name + ".wh",
                       glorot_uniform({units, 4 * units}, units, 4 * units,
                                      rng),
                       /*is_weight_matrix=*/true)),
      b_(store.create(name + ".b", Tensor::zeros({4 * units}),
                      /*is_weight_matrix=*/false)),
      units_(units) {
  // Forget gate opens at init; gate order is i, f, g, o.
  for (std::size_t j = units; j < 2 * units; ++j) b_->value()[j] = 1.0;
}

NodePtr LstmLayer::forward(const NodePtr& x, bool return_sequences) const {
  const Tensor& xv = x->value;
  if (xv.rank() != 2 && xv.rank() != 3) {
    throw ShapeError("ShapeMismatch: lstm wants [L×D] or [B×L×D], got " +
                     xv.shape_string());
  }
  const bool batched = xv.rank() == 3;
  NodePtr input = batched ? x : reshape(x, {1, xv.dim(0), xv.dim(1)});
  const std::size_t batch = input->value.dim(0);
  const std::size_t len = input->value.dim(1);
  if (len == 0) throw ShapeError("InputTooShort: empty sequence");
  const std::size_t h = units_;

  NodePtr state_h = constant(Tensor::zeros({batch, h}));
  NodePtr state_c = constant(Tensor::zeros({batch, h}));
  std::vector<NodePtr> outputs;
  outputs.reserve(len);
  for (std::size_t t = 0; t < len; ++t) {
    NodePtr xt = select_time(input, t);  // [B×D]
    NodePtr gates = add_broadcast(
        add(matmul(xt, wx_->node), matmul(state_h, wh_->node)), b_->node);
    NodePtr i_gate = sigmoid(slice_lastdim(gates, 0, h));
    NodePtr f_gate = sigmoid(slice_lastdim(gates, h, h));
    NodePtr g_cand = tanh_op(slice_lastdim(gates, 2 * h, h));
    NodePtr o_gate = sigmoid(slice_lastdim(gates, 3 * h, h));
    state_c = add(mul(f_gate, state_c), mul(i_gate, g_cand));
    state_h = mul(o_gate, tanh_op(state_c));
    outputs.push_back(state_h);
  }

  NodePtr result =
      return_sequences ? stack_time(outputs) : outputs.back();
  if (!batched) {
    result = return_sequences ? reshape(result, {len, h})
                              : reshape(result, {h});
  }
  return result;
}

Lstm::Lstm(ParameterStore& store, Rng& rng, const std::string& name,
           std::size_t input_dim, std::size_t units, Direction direction)
    : forward_(store, rng, name + ".fwd", input_dim, units) {
  if (direction == Direction::kBidirectional) {
    backward_.emplace(store, rng, name + ".bwd", input_dim, units);
  }
}

NodePtr Lstm::forward(const NodePtr& x, bool return_sequences) const {
  NodePtr fwd = forward_.forward(x, return_sequences);
  if (!backward_) return fwd;
  // The reverse cell reads the sequence back to front; its sequence output
  // is flipped back so positions align before concatenation.
  NodePtr rev_in = reverse_time(x);
  NodePtr bwd = backward_->forward(rev_in, return_sequences);
  if (return_sequences) bwd = reverse_time(bwd);
  return concat_lastdim({fwd, bwd});
}

std::size_t Lstm::output_dim() const {
  return backward_ ? 2 * forward_.units() : forward_.units();
}

NodePtr scaled_dot_attention(const NodePtr& q, const NodePtr& k,
                             const NodePtr& v, const Tensor* mask) {
  const std::size_t d = q->value.shape().back();
  NodePtr scores = scale(matmul_nt(q, k),
                         1.0 / std::sqrt(static_cast<double>(d)));
  NodePtr attn = mask ? masked_softmax(scores, *mask)
                      : softmax_lastdim(scores);
  return matmul(attn, v);
}

MultiHeadAttention::MultiHeadAttention(ParameterStore& store, Rng& rng,
                                       const std::string& name,
                                       std::size_t model_dim,
                                       std::size_t heads)
    : heads_(heads), model_dim_(model_dim), head_dim_(0) {
  if (heads == 0 || model_dim % heads != 0) {
    throw ShapeError("DimNotDivisible: model dim " +
                     std::to_string(model_dim) + " not divisible by " +
                     std::to_string(heads) + " heads");
  }
  head_dim_ = model_dim / heads;
  auto make_proj = [&](const char* suffix) {
    return store.create(
        name + "." + suffix,
        glorot_uniform({model_dim, model_dim}, model_dim, model_dim, rng),
        /*is_weight_matrix=*/true);
  };
  auto make_bias = [&](const char* suffix) {
    return store.create(name + "." + suffix, Tensor::zeros({model_dim}),
                        /*is_weight_matrix=*/false);
  };
  wq_ = make_proj("wq");
  wk_ = make_proj("wk");
  wv_ = make_proj("wv");
  wo_ = make_proj("wo");
  bq_ = make_bias("bq");
  bk_ = make_bias("bk");
  bv_ = make_bias("bv");
  bo_ = make_bias("bo");
}

NodePtr MultiHeadAttention::forward(const NodePtr& q, const NodePtr& k,
                                    const NodePtr& v,
                                    const Tensor* mask) const {
  NodePtr qp = add_broadcast(matmul(q, wq_->node), bq_->node);
  NodePtr kp = add_broadcast(matmul(k, wk_->node), bk_->node);
  NodePtr vp = add_broadcast(matmul(v, wv_->node), bv_->node);
  std::vector<NodePtr> heads;
  heads.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const std::size_t off = h * head_dim_;
    heads.push_back(scaled_dot_attention(slice_lastdim(qp, off, head_dim_),
                                         slice_lastdim(kp, off, head_dim_),
                                         slice_lastdim(vp, off, head_dim_),
                                         mask));
  }
  NodePtr ctx = heads.size() == 1 ? heads[0] : concat_lastdim(heads);
  return add_broadcast(matmul(ctx, wo_->node), bo_->node);
}

LayerNormLayer::LayerNormLayer(ParameterStore& store, const std::string& name,
                               std::size_t dim, double epsilon)
    : gamma_(store.create(name + ".gamma", Tensor::full({dim}, 1.0),
                          /*is_weight_matrix=*/false)),
      beta_(store.create(name + ".beta", Tensor::zeros({dim}),
                         /*is_weight_matrix=*/false)),
      epsilon_(epsilon) {}

NodePtr LayerNormLayer::forward(const NodePtr& x) const {
  return layer_norm(x, gamma_->node, beta_->node, epsilon_);
}

NodePtr l2_penalty(const std::vector<ParamPtr>& params, double lambda) {
  if (lambda < 0.0) {
    throw ValueError("BadLambda: l2 coefficient must be >= 0");
  }
  if (lambda == 0.0) return constant(Tensor::scalar(0.0));
  NodePtr acc;
  for (const ParamPtr& p : params) {
    if (!p->trainable || !p->is_weight_matrix) continue;
    NodePtr term = sum_squares(p->node);
    acc = acc ? add(acc, term) : term;
  }
  if (!acc) return constant(Tensor::scalar(0.0));
  return scale(acc, lambda);
}

}  // namespace hs::nn
