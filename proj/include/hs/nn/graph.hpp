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
#include <memory>
#include <vector>

#include "hs/common/rng.hpp"
#include "hs/nn/tensor.hpp"

namespace hs::nn {

// One vertex of a dynamically recorded computation graph. Reverse-mode
// autodiff: each op stores a closure that scatters the node's gradient into
// its parents. Parents own nothing downstream, so the graph is an acyclic
// shared_ptr forest that frees itself when the root goes out of scope.
struct Node {
  Tensor value;
  Tensor grad;  // allocated lazily; same shape as value once touched
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  bool requires_grad = false;

  Tensor& ensure_grad();
};

using NodePtr = std::shared_ptr<Node>;

// Leaf without gradient tracking (inputs, masks, ids).
NodePtr constant(Tensor value);

// Leaf with gradient tracking (weights; gradcheck probes).
NodePtr leaf(Tensor value);

// Runs the backward sweep from a scalar root: seeds d(root)/d(root) = 1 and
// visits nodes in reverse topological order (iterative; recursion would
// overflow on long LSTM chains). Gradients accumulate, so callers zero
// persistent leaves between steps.
void backward(const NodePtr& root);

// --- elementwise and reduction ---
NodePtr add(const NodePtr& a, const NodePtr& b);           // same shape
NodePtr add_broadcast(const NodePtr& a, const NodePtr& b); // b = suffix shape
NodePtr sub(const NodePtr& a, const NodePtr& b);
NodePtr mul(const NodePtr& a, const NodePtr& b);           // elementwise
NodePtr scale(const NodePtr& a, double c);
NodePtr sum(const NodePtr& a);          // -> scalar
NodePtr mean(const NodePtr& a);         // -> scalar
NodePtr sum_squares(const NodePtr& a);  // -> scalar

// --- linear algebra ---
// matmul accepts [m×k]·[k×n], [B×m×k]·[k×n] and [B×m×k]·[B×k×n].
NodePtr matmul(const NodePtr& a, const NodePtr& b);
// a·bᵀ for [m×k]·[n×k] and [B×m×k]·[B×n×k]; attention scores need it.
NodePtr matmul_nt(const NodePtr& a, const NodePtr& b);

// --- activations ---
NodePtr relu(const NodePtr& a);
NodePtr sigmoid(const NodePtr& a);
NodePtr tanh_op(const NodePtr& a);
NodePtr softmax_lastdim(const NodePtr& a);
// mask entries: 1 = attend, 0 = blocked (set to -inf pre-softmax). mask
// shape equals the score shape or is a suffix of it ([L×L] under [B×L×L]).
// A fully blocked row yields zeros.
NodePtr masked_softmax(const NodePtr& scores, const Tensor& mask);

// --- shape surgery ---
// Same element count, new shape; data order unchanged.
NodePtr reshape(const NodePtr& a, std::vector<std::size_t> shape);
NodePtr concat_lastdim(const std::vector<NodePtr>& parts);
NodePtr slice_lastdim(const NodePtr& a, std::size_t offset, std::size_t width);
// Rows [offset, offset+count) of a rank-2 tensor.
NodePtr slice_rows(const NodePtr& a, std::size_t offset, std::size_t count);
// [B×L×D] -> [B×D] at time t; [L×D] -> [D].
NodePtr select_time(const NodePtr& a, std::size_t t);
// Inverse of select_time over a whole sequence: L×([B×H]) -> [B×L×H],
// L×([H]) -> [L×H].
NodePtr stack_time(const std::vector<NodePtr>& steps);
// Reverses the time axis: [B×L×D] or [L×D].
NodePtr reverse_time(const NodePtr& a);

// --- embeddings, conv, pooling ---
// ids: [B×L] (or [L] as a single row), every id < V. freeze_pad skips
// gradient accumulation into row 0.
NodePtr embedding_lookup(const std::vector<std::vector<int>>& ids,
                         const NodePtr& table, bool freeze_pad = false);
// Single-sequence variant producing [L×d].
NodePtr embedding_lookup(const std::vector<int>& ids, const NodePtr& table,
                         bool freeze_pad = false);
// x [L×C] or [B×L×C]; w [K×C×F]; bias [F]. Valid correlation, no padding.
NodePtr conv1d(const NodePtr& x, const NodePtr& w, const NodePtr& bias);
// Non-overlapping windows, stride = pool, remainder truncated. Gradient
// goes to the first maximal element of each window.
NodePtr maxpool1d(const NodePtr& x, std::size_t pool);
// [L×F] -> [F]; [B×L×F] -> [B×F].
NodePtr global_maxpool(const NodePtr& x);

// Training mode draws one Bernoulli mask and scales survivors by
// 1/(1-rate); inference returns the input node itself, bit-exact.
NodePtr dropout(const NodePtr& a, double rate, bool training, Rng& rng);

// Per-position normalization over the last axis, then affine. gamma/beta
// are [D] leaves.
NodePtr layer_norm(const NodePtr& x, const NodePtr& gamma,
                   const NodePtr& beta, double epsilon = 1e-5);

// --- losses ---
// Scalar form; throws NumericError DomainError outside (0,1).
double bce_loss(double pred, double label);
// Mean binary cross-entropy over a batch of probabilities [B] or [B×1].
// Probabilities are nudged into [eps, 1-eps] before the log so a saturated
// sigmoid cannot produce Inf.
NodePtr bce_mean(const NodePtr& probs, const std::vector<double>& labels);
// logits [B×L×V]; mean token cross-entropy over positions where
// pad_mask[b][t] is true (true = count it). Throws ValueError when no
// position is valid.
NodePtr masked_ce_mean(const NodePtr& logits,
                       const std::vector<std::vector<int>>& targets,
                       const std::vector<std::vector<bool>>& pad_mask);

}  // namespace hs::nn
