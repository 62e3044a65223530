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

#include "hs/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "hs/common/error.hpp"

namespace hs::nn {
namespace {

NodePtr make_node(Tensor value, std::vector<NodePtr> parents,
                  std::function<void(Node&)> bw, const char* context) {
  value.check_finite(context);
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->parents = std::move(parents);
  for (const NodePtr& p : node->parents) {
    if (p->requires_grad) {
      node->requires_grad = true;
      break;
    }
  }
  if (node->requires_grad) node->backward_fn = std::move(bw);
  return node;
}

void require_same_shape(const NodePtr& a, const NodePtr& b, const char* op) {
  if (!a->value.same_shape(b->value)) {
    throw ShapeError(std::string("ShapeMismatch: ") + op + " on " +
                     a->value.shape_string() + " vs " +
                     b->value.shape_string());
  }
}

// out[m×n] += a[m×k] · b[k×n]
void mm(const double* a, const double* b, double* out, std::size_t m,
        std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* out_row = out + i * n;
    const double* a_row = a + i * k;
    for (std::size_t t = 0; t < k; ++t) {
      const double av = a_row[t];
      if (av == 0.0) continue;
      const double* b_row = b + t * n;
      for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
    }
  }
}

// out[m×n] += a[m×k] · b[n×k]ᵀ
void mm_nt(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a_row = a + i * k;
    double* out_row = out + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b_row = b + j * k;
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += a_row[t] * b_row[t];
      out_row[j] += acc;
    }
  }
}

// out[m×n] += a[k×m]ᵀ · b[k×n]
void mm_tn(const double* a, const double* b, double* out, std::size_t m,
           std::size_t k, std::size_t n) {
  for (std::size_t t = 0; t < k; ++t) {
    const double* a_row = a + t * m;
    const double* b_row = b + t * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = a_row[i];
      if (av == 0.0) continue;
      double* out_row = out + i * n;
      for (std::size_t j = 0; j < n; ++j) out_row[j] += av * b_row[j];
    }
  }
}

std::size_t last_dim(const Tensor& t, const char* op) {
  if (t.rank() == 0) {
    throw ShapeError(std::string("ShapeMismatch: ") + op +
                     " needs rank >= 1, got a scalar");
  }
  return t.shape().back();
}

}  // namespace

Tensor& Node::ensure_grad() {
  if (grad.size() == 0 && value.size() != 0) {
    grad = Tensor::zeros(value.shape());
  }
  return grad;
}

NodePtr constant(Tensor value) {
  value.check_finite("constant");
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return node;
}

NodePtr leaf(Tensor value) {
  value.check_finite("leaf");
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return node;
}

void backward(const NodePtr& root) {
  if (!root) throw ValueError("NullNode: backward on empty node");
  if (root->value.size() != 1) {
    throw ShapeError("ShapeMismatch: backward needs a scalar root, got " +
                     root->value.shape_string());
  }
  if (!root->requires_grad) return;

  // Iterative post-order DFS; reversed, it is a topological order with every
  // consumer handled before the node it consumes.
  std::unordered_set<const Node*> visited;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  std::vector<NodePtr> post;
  visited.insert(root.get());
  stack.emplace_back(root, 0);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      NodePtr parent = node->parents[next++];
      if (parent->requires_grad && visited.insert(parent.get()).second) {
        stack.emplace_back(std::move(parent), 0);
      }
      continue;
    }
    post.push_back(std::move(node));
    stack.pop_back();
  }

  root->ensure_grad()[0] = 1.0;
  for (auto it = post.rbegin(); it != post.rend(); ++it) {
    Node& node = **it;
    if (!node.backward_fn || node.grad.size() == 0) continue;
    node.grad.check_finite("backward");
    node.backward_fn(node);
  }
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
  require_same_shape(a, b, "add");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  return make_node(std::move(out), {a, b},
                   [a, b](Node& self) {
                     if (a->requires_grad) {
                       Tensor& ga = a->ensure_grad();
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += self.grad[i];
                       }
                     }
                     if (b->requires_grad) {
                       Tensor& gb = b->ensure_grad();
                       for (std::size_t i = 0; i < gb.size(); ++i) {
                         gb[i] += self.grad[i];
                       }
                     }
                   },
                   "add");
}

NodePtr add_broadcast(const NodePtr& a, const NodePtr& b) {
  const auto& ash = a->value.shape();
  const auto& bsh = b->value.shape();
  if (bsh.size() > ash.size() ||
      !std::equal(bsh.rbegin(), bsh.rend(), ash.rbegin())) {
    throw ShapeError("ShapeMismatch: add_broadcast needs the second shape " +
                     b->value.shape_string() + " to be a suffix of " +
                     a->value.shape_string());
  }
  const std::size_t bs = b->value.size();
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b->value[i % bs];
  return make_node(std::move(out), {a, b},
                   [a, b, bs](Node& self) {
                     if (a->requires_grad) {
                       Tensor& ga = a->ensure_grad();
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += self.grad[i];
                       }
                     }
                     if (b->requires_grad) {
                       Tensor& gb = b->ensure_grad();
                       for (std::size_t i = 0; i < self.grad.size(); ++i) {
                         gb[i % bs] += self.grad[i];
                       }
                     }
                   },
                   "add_broadcast");
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b->value[i];
  return make_node(std::move(out), {a, b},
                   [a, b](Node& self) {
                     if (a->requires_grad) {
                       Tensor& ga = a->ensure_grad();
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += self.grad[i];
                       }
                     }
                     if (b->requires_grad) {
                       Tensor& gb = b->ensure_grad();
                       for (std::size_t i = 0; i < gb.size(); ++i) {
                         gb[i] -= self.grad[i];
                       }
                     }
                   },
                   "sub");
}

NodePtr mul(const NodePtr& a, const NodePtr& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b->value[i];
  return make_node(std::move(out), {a, b},
                   [a, b](Node& self) {
                     if (a->requires_grad) {
                       Tensor& ga = a->ensure_grad();
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += self.grad[i] * b->value[i];
                       }
                     }
                     if (b->requires_grad) {
                       Tensor& gb = b->ensure_grad();
                       for (std::size_t i = 0; i < gb.size(); ++i) {
                         gb[i] += self.grad[i] * a->value[i];
                       }
                     }
                   },
                   "mul");
}

NodePtr scale(const NodePtr& a, double c) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return make_node(std::move(out), {a},
                   [a, c](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       ga[i] += c * self.grad[i];
                     }
                   },
                   "scale");
}

NodePtr sum(const NodePtr& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) total += a->value[i];
  return make_node(Tensor::scalar(total), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     const double g = self.grad[0];
                     for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
                   },
                   "sum");
}

NodePtr mean(const NodePtr& a) {
  if (a->value.size() == 0) {
    throw ValueError("EmptyTensor: mean of an empty tensor");
  }
  const double inv = 1.0 / static_cast<double>(a->value.size());
  double total = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) total += a->value[i];
  return make_node(Tensor::scalar(total * inv), {a},
                   [a, inv](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     const double g = self.grad[0] * inv;
                     for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
                   },
                   "mean");
}

NodePtr sum_squares(const NodePtr& a) {
  double total = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) {
    total += a->value[i] * a->value[i];
  }
  return make_node(Tensor::scalar(total), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     const double g = self.grad[0];
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       ga[i] += 2.0 * a->value[i] * g;
                     }
                   },
                   "sum_squares");
}

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
  const Tensor& av = a->value;
  const Tensor& bv = b->value;
  const std::size_t ra = av.rank();
  const std::size_t rb = bv.rank();
  if (!((ra == 2 && rb == 2) || (ra == 3 && rb == 2) || (ra == 3 && rb == 3))) {
    throw ShapeError("ShapeMismatch: matmul supports 2x2, 3x2 and 3x3 ranks, "
                     "got " + av.shape_string() + " and " + bv.shape_string());
  }
  const std::size_t batch = ra == 3 ? av.dim(0) : 1;
  const std::size_t m = av.dim(ra - 2);
  const std::size_t k = av.dim(ra - 1);
  const std::size_t kb = bv.dim(rb - 2);
  const std::size_t n = bv.dim(rb - 1);
  if (k != kb || (rb == 3 && bv.dim(0) != batch)) {
    throw ShapeError("ShapeMismatch: matmul " + av.shape_string() + " by " +
                     bv.shape_string());
  }

  std::vector<std::size_t> out_shape =
      ra == 3 ? std::vector<std::size_t>{batch, m, n}
              : std::vector<std::size_t>{m, n};
  Tensor out(std::move(out_shape));
  for (std::size_t s = 0; s < batch; ++s) {
    const double* ap = av.data() + s * m * k;
    const double* bp = bv.data() + (rb == 3 ? s * k * n : 0);
    mm(ap, bp, out.data() + s * m * n, m, k, n);
  }

  return make_node(
      std::move(out), {a, b},
      [a, b, batch, m, k, n, rb](Node& self) {
        const double* g = self.grad.data();
        if (a->requires_grad) {
          Tensor& ga = a->ensure_grad();
          for (std::size_t s = 0; s < batch; ++s) {
            const double* bp = b->value.data() + (rb == 3 ? s * k * n : 0);
            // dA = dY · Bᵀ
            mm_nt(g + s * m * n, bp, ga.data() + s * m * k, m, n, k);
          }
        }
        if (b->requires_grad) {
          Tensor& gb = b->ensure_grad();
          for (std::size_t s = 0; s < batch; ++s) {
            const double* ap = a->value.data() + s * m * k;
            // dB = Aᵀ · dY, summed over the batch when B is shared
            mm_tn(ap, g + s * m * n, gb.data() + (rb == 3 ? s * k * n : 0), k,
                  m, n);
          }
        }
      },
      "matmul");
}

NodePtr matmul_nt(const NodePtr& a, const NodePtr& b) {
  const Tensor& av = a->value;
  const Tensor& bv = b->value;
  const std::size_t ra = av.rank();
  const std::size_t rb = bv.rank();
  if (!((ra == 2 && rb == 2) || (ra == 3 && rb == 3))) {
    throw ShapeError("ShapeMismatch: matmul_nt supports 2x2 and 3x3 ranks, "
                     "got " + av.shape_string() + " and " + bv.shape_string());
  }
  const std::size_t batch = ra == 3 ? av.dim(0) : 1;
  const std::size_t m = av.dim(ra - 2);
  const std::size_t k = av.dim(ra - 1);
  const std::size_t n = bv.dim(rb - 2);
  if (bv.dim(rb - 1) != k || (rb == 3 && bv.dim(0) != batch)) {
    throw ShapeError("ShapeMismatch: matmul_nt " + av.shape_string() + " by " +
                     bv.shape_string());
  }

  std::vector<std::size_t> out_shape =
      ra == 3 ? std::vector<std::size_t>{batch, m, n}
              : std::vector<std::size_t>{m, n};
  Tensor out(std::move(out_shape));
  for (std::size_t s = 0; s < batch; ++s) {
    mm_nt(av.data() + s * m * k, bv.data() + s * n * k,
          out.data() + s * m * n, m, k, n);
  }

  return make_node(
      std::move(out), {a, b},
      [a, b, batch, m, k, n](Node& self) {
        const double* g = self.grad.data();
        if (a->requires_grad) {
          Tensor& ga = a->ensure_grad();
          for (std::size_t s = 0; s < batch; ++s) {
            // dA = dY · B
            mm(g + s * m * n, b->value.data() + s * n * k,
               ga.data() + s * m * k, m, n, k);
          }
        }
        if (b->requires_grad) {
          Tensor& gb = b->ensure_grad();
          for (std::size_t s = 0; s < batch; ++s) {
            // dB = dYᵀ · A
            mm_tn(g + s * m * n, a->value.data() + s * m * k,
                  gb.data() + s * n * k, n, m, k);
          }
        }
      },
      "matmul_nt");
}

NodePtr relu(const NodePtr& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], 0.0);
  return make_node(std::move(out), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       if (a->value[i] > 0.0) ga[i] += self.grad[i];
                     }
                   },
                   "relu");
}

NodePtr sigmoid(const NodePtr& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  }
  return make_node(std::move(out), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       const double y = self.value[i];
                       ga[i] += self.grad[i] * y * (1.0 - y);
                     }
                   },
                   "sigmoid");
}

NodePtr tanh_op(const NodePtr& a) {
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return make_node(std::move(out), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       const double y = self.value[i];
                       ga[i] += self.grad[i] * (1.0 - y * y);
                     }
                   },
                   "tanh");
}

NodePtr softmax_lastdim(const NodePtr& a) {
  const std::size_t width = last_dim(a->value, "softmax");
  if (width == 0) throw ShapeError("ShapeMismatch: softmax over width 0");
  const std::size_t rows = a->value.size() / width;
  Tensor out = a->value;
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data() + r * width;
    double mx = row[0];
    for (std::size_t j = 1; j < width; ++j) mx = std::max(mx, row[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      row[j] = std::exp(row[j] - mx);
      total += row[j];
    }
    for (std::size_t j = 0; j < width; ++j) row[j] /= total;
  }
  return make_node(std::move(out), {a},
                   [a, rows, width](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t r = 0; r < rows; ++r) {
                       const double* y = self.value.data() + r * width;
                       const double* g = self.grad.data() + r * width;
                       double dot = 0.0;
                       for (std::size_t j = 0; j < width; ++j) {
                         dot += g[j] * y[j];
                       }
                       double* out_g = ga.data() + r * width;
                       for (std::size_t j = 0; j < width; ++j) {
                         out_g[j] += y[j] * (g[j] - dot);
                       }
                     }
                   },
                   "softmax");
}

NodePtr masked_softmax(const NodePtr& scores, const Tensor& mask) {
  const std::size_t width = last_dim(scores->value, "masked_softmax");
  const auto& ssh = scores->value.shape();
  const auto& msh = mask.shape();
  if (msh.size() > ssh.size() ||
      !std::equal(msh.rbegin(), msh.rend(), ssh.rbegin())) {
    throw ShapeError("ShapeMismatch: mask " + mask.shape_string() +
                     " is not a suffix of scores " +
                     scores->value.shape_string());
  }
  const std::size_t ms = mask.size();
  const std::size_t rows = scores->value.size() / width;
  Tensor out = scores->value;
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = out.data() + r * width;
    const std::size_t base = (r * width) % ms;
    double mx = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < width; ++j) {
      if (mask[base + j] == 0.0) continue;
      if (!any || row[j] > mx) mx = row[j];
      any = true;
    }
    if (!any) {
      // Fully blocked row contributes nothing and gets no gradient.
      for (std::size_t j = 0; j < width; ++j) row[j] = 0.0;
      continue;
    }
    double total = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      if (mask[base + j] == 0.0) {
        row[j] = 0.0;
      } else {
        row[j] = std::exp(row[j] - mx);
        total += row[j];
      }
    }
    for (std::size_t j = 0; j < width; ++j) row[j] /= total;
  }
  return make_node(std::move(out), {scores},
                   [scores, rows, width](Node& self) {
                     Tensor& ga = scores->ensure_grad();
                     for (std::size_t r = 0; r < rows; ++r) {
                       const double* y = self.value.data() + r * width;
                       const double* g = self.grad.data() + r * width;
                       double dot = 0.0;
                       for (std::size_t j = 0; j < width; ++j) {
                         dot += g[j] * y[j];
                       }
                       double* out_g = ga.data() + r * width;
                       for (std::size_t j = 0; j < width; ++j) {
                         out_g[j] += y[j] * (g[j] - dot);
                       }
                     }
                   },
                   "masked_softmax");
}

NodePtr reshape(const NodePtr& a, std::vector<std::size_t> shape) {
  if (shape_product(shape) != a->value.size()) {
    throw ShapeError("ShapeMismatch: reshape of " + a->value.shape_string() +
                     " cannot hold " + std::to_string(shape_product(shape)) +
                     " values");
  }
  Tensor out(std::move(shape), a->value.values());
  return make_node(std::move(out), {a},
                   [a](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       ga[i] += self.grad[i];
                     }
                   },
                   "reshape");
}

NodePtr concat_lastdim(const std::vector<NodePtr>& parts) {
  if (parts.empty()) {
    throw ValueError("EmptyList: concat_lastdim needs at least one part");
  }
  const auto& head = parts[0]->value.shape();
  std::size_t total_width = 0;
  std::vector<std::size_t> widths;
  for (const NodePtr& p : parts) {
    const auto& sh = p->value.shape();
    if (sh.size() != head.size() ||
        !std::equal(sh.begin(), sh.end() - 1, head.begin())) {
      throw ShapeError(
          "ShapeMismatch: concat_lastdim parts disagree on leading dims");
    }
    widths.push_back(sh.back());
    total_width += sh.back();
  }
  std::vector<std::size_t> out_shape = head;
  out_shape.back() = total_width;
  const std::size_t rows = shape_product(out_shape) / total_width;
  Tensor out(out_shape);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.data() + r * total_width;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const double* src = parts[p]->value.data() + r * widths[p];
      std::copy(src, src + widths[p], dst);
      dst += widths[p];
    }
  }
  return make_node(std::move(out), parts,
                   [parts, widths, rows, total_width](Node& self) {
                     for (std::size_t r = 0; r < rows; ++r) {
                       const double* g = self.grad.data() + r * total_width;
                       for (std::size_t p = 0; p < parts.size(); ++p) {
                         if (parts[p]->requires_grad) {
                           Tensor& gp = parts[p]->ensure_grad();
                           double* dst = gp.data() + r * widths[p];
                           for (std::size_t j = 0; j < widths[p]; ++j) {
                             dst[j] += g[j];
                           }
                         }
                         g += widths[p];
                       }
                     }
                   },
                   "concat_lastdim");
}

NodePtr slice_lastdim(const NodePtr& a, std::size_t offset,
                      std::size_t width) {
  const std::size_t full = last_dim(a->value, "slice_lastdim");
  if (offset + width > full || width == 0) {
    throw ShapeError("ShapeMismatch: slice [" + std::to_string(offset) +
                     ", " + std::to_string(offset + width) +
                     ") outside width " + std::to_string(full));
  }
  std::vector<std::size_t> out_shape = a->value.shape();
  out_shape.back() = width;
  const std::size_t rows = a->value.size() / full;
  Tensor out(out_shape);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = a->value.data() + r * full + offset;
    std::copy(src, src + width, out.data() + r * width);
  }
  return make_node(std::move(out), {a},
                   [a, offset, width, rows, full](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t r = 0; r < rows; ++r) {
                       const double* g = self.grad.data() + r * width;
                       double* dst = ga.data() + r * full + offset;
                       for (std::size_t j = 0; j < width; ++j) dst[j] += g[j];
                     }
                   },
                   "slice_lastdim");
}

NodePtr slice_rows(const NodePtr& a, std::size_t offset, std::size_t count) {
  if (a->value.rank() != 2) {
    throw ShapeError("ShapeMismatch: slice_rows needs rank 2, got " +
                     a->value.shape_string());
  }
  const std::size_t rows = a->value.dim(0);
  const std::size_t cols = a->value.dim(1);
  if (offset + count > rows) {
    throw ShapeError("ShapeMismatch: rows [" + std::to_string(offset) + ", " +
                     std::to_string(offset + count) + ") outside " +
                     std::to_string(rows));
  }
  Tensor out({count, cols});
  std::copy(a->value.data() + offset * cols,
            a->value.data() + (offset + count) * cols, out.data());
  return make_node(std::move(out), {a},
                   [a, offset, count, cols](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     const double* g = self.grad.data();
                     double* dst = ga.data() + offset * cols;
                     for (std::size_t i = 0; i < count * cols; ++i) {
                       dst[i] += g[i];
                     }
                   },
                   "slice_rows");
}

NodePtr select_time(const NodePtr& a, std::size_t t) {
  const Tensor& av = a->value;
  if (av.rank() != 2 && av.rank() != 3) {
    throw ShapeError("ShapeMismatch: select_time needs rank 2 or 3, got " +
                     av.shape_string());
  }
  const bool batched = av.rank() == 3;
  const std::size_t batch = batched ? av.dim(0) : 1;
  const std::size_t len = batched ? av.dim(1) : av.dim(0);
  const std::size_t dim = batched ? av.dim(2) : av.dim(1);
  if (t >= len) {
    throw ShapeError("ShapeMismatch: time " + std::to_string(t) +
                     " outside length " + std::to_string(len));
  }
  Tensor out(batched ? std::vector<std::size_t>{batch, dim}
                     : std::vector<std::size_t>{dim});
  for (std::size_t s = 0; s < batch; ++s) {
    const double* src = av.data() + (s * len + t) * dim;
    std::copy(src, src + dim, out.data() + s * dim);
  }
  return make_node(std::move(out), {a},
                   [a, t, batch, len, dim](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t s = 0; s < batch; ++s) {
                       const double* g = self.grad.data() + s * dim;
                       double* dst = ga.data() + (s * len + t) * dim;
                       for (std::size_t j = 0; j < dim; ++j) dst[j] += g[j];
                     }
                   },
                   "select_time");
}

NodePtr stack_time(const std::vector<NodePtr>& steps) {
  if (steps.empty()) {
    throw ValueError("EmptyList: stack_time needs at least one step");
  }
  const Tensor& head = steps[0]->value;
  if (head.rank() != 1 && head.rank() != 2) {
    throw ShapeError("ShapeMismatch: stack_time steps need rank 1 or 2, got " +
                     head.shape_string());
  }
  for (const NodePtr& s : steps) {
    if (!s->value.same_shape(head)) {
      throw ShapeError("ShapeMismatch: stack_time steps disagree: " +
                       head.shape_string() + " vs " +
                       s->value.shape_string());
    }
  }
  const bool batched = head.rank() == 2;
  const std::size_t batch = batched ? head.dim(0) : 1;
  const std::size_t dim = batched ? head.dim(1) : head.dim(0);
  const std::size_t len = steps.size();
  Tensor out(batched ? std::vector<std::size_t>{batch, len, dim}
                     : std::vector<std::size_t>{len, dim});
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t s = 0; s < batch; ++s) {
      const double* src = steps[t]->value.data() + s * dim;
      std::copy(src, src + dim, out.data() + (s * len + t) * dim);
    }
  }
  return make_node(std::move(out), steps,
                   [steps, batch, len, dim](Node& self) {
                     for (std::size_t t = 0; t < len; ++t) {
                       if (!steps[t]->requires_grad) continue;
                       Tensor& gs = steps[t]->ensure_grad();
                       for (std::size_t s = 0; s < batch; ++s) {
                         const double* g =
                             self.grad.data() + (s * len + t) * dim;
                         double* dst = gs.data() + s * dim;
                         for (std::size_t j = 0; j < dim; ++j) dst[j] += g[j];
                       }
                     }
                   },
                   "stack_time");
}

NodePtr reverse_time(const NodePtr& a) {
  const Tensor& av = a->value;
  if (av.rank() != 2 && av.rank() != 3) {
    throw ShapeError("ShapeMismatch: reverse_time needs rank 2 or 3, got " +
                     av.shape_string());
  }
  const bool batched = av.rank() == 3;
  const std::size_t batch = batched ? av.dim(0) : 1;
  const std::size_t len = batched ? av.dim(1) : av.dim(0);
  const std::size_t dim = batched ? av.dim(2) : av.dim(1);
  Tensor out(av.shape());
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t t = 0; t < len; ++t) {
      const double* src = av.data() + (s * len + t) * dim;
      std::copy(src, src + dim,
                out.data() + (s * len + (len - 1 - t)) * dim);
    }
  }
  return make_node(std::move(out), {a},
                   [a, batch, len, dim](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t s = 0; s < batch; ++s) {
                       for (std::size_t t = 0; t < len; ++t) {
                         const double* g =
                             self.grad.data() + (s * len + (len - 1 - t)) * dim;
                         double* dst = ga.data() + (s * len + t) * dim;
                         for (std::size_t j = 0; j < dim; ++j) dst[j] += g[j];
                       }
                     }
                   },
                   "reverse_time");
}

namespace {

NodePtr embedding_lookup_impl(const std::vector<std::vector<int>>& ids,
                              const NodePtr& table, bool freeze_pad,
                              bool batched) {
  if (table->value.rank() != 2) {
    throw ShapeError("ShapeMismatch: embedding table needs rank 2, got " +
                     table->value.shape_string());
  }
  const std::size_t vocab = table->value.dim(0);
  const std::size_t dim = table->value.dim(1);
  const std::size_t batch = ids.size();
  if (batch == 0) throw ValueError("EmptyList: no id rows to look up");
  const std::size_t len = ids[0].size();
  for (const auto& row : ids) {
    if (row.size() != len) {
      throw ShapeError("ShapeMismatch: ragged id rows in embedding_lookup");
    }
    for (int id : row) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
        throw ValueError("IdOutOfRange: id " + std::to_string(id) +
                         " outside vocabulary of " + std::to_string(vocab));
      }
    }
  }
  Tensor out(batched ? std::vector<std::size_t>{batch, len, dim}
                     : std::vector<std::size_t>{len, dim});
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t t = 0; t < len; ++t) {
      const double* src =
          table->value.data() + static_cast<std::size_t>(ids[s][t]) * dim;
      std::copy(src, src + dim, out.data() + (s * len + t) * dim);
    }
  }
  return make_node(std::move(out), {table},
                   [table, ids, freeze_pad, batch, len, dim](Node& self) {
                     Tensor& gt = table->ensure_grad();
                     for (std::size_t s = 0; s < batch; ++s) {
                       for (std::size_t t = 0; t < len; ++t) {
                         const int id = ids[s][t];
                         if (freeze_pad && id == 0) continue;
                         const double* g =
                             self.grad.data() + (s * len + t) * dim;
                         double* dst =
                             gt.data() + static_cast<std::size_t>(id) * dim;
                         for (std::size_t j = 0; j < dim; ++j) dst[j] += g[j];
                       }
                     }
                   },
                   "embedding_lookup");
}

}  // namespace

NodePtr embedding_lookup(const std::vector<std::vector<int>>& ids,
                         const NodePtr& table, bool freeze_pad) {
  return embedding_lookup_impl(ids, table, freeze_pad, /*batched=*/true);
}

NodePtr embedding_lookup(const std::vector<int>& ids, const NodePtr& table,
                         bool freeze_pad) {
  return embedding_lookup_impl({ids}, table, freeze_pad, /*batched=*/false);
}

NodePtr conv1d(const NodePtr& x, const NodePtr& w, const NodePtr& bias) {
  const Tensor& xv = x->value;
  const Tensor& wv = w->value;
  if ((xv.rank() != 2 && xv.rank() != 3) || wv.rank() != 3 ||
      bias->value.rank() != 1) {
    throw ShapeError("ShapeMismatch: conv1d wants x rank 2/3, w rank 3, "
                     "bias rank 1");
  }
  const bool batched = xv.rank() == 3;
  const std::size_t batch = batched ? xv.dim(0) : 1;
  const std::size_t len = batched ? xv.dim(1) : xv.dim(0);
  const std::size_t ch = batched ? xv.dim(2) : xv.dim(1);
  const std::size_t kernel = wv.dim(0);
  const std::size_t filters = wv.dim(2);
  if (wv.dim(1) != ch || bias->value.dim(0) != filters) {
    throw ShapeError("ShapeMismatch: conv1d filters " + wv.shape_string() +
                     " do not fit input " + xv.shape_string());
  }
  if (len < kernel) {
    throw ShapeError("InputTooShort: length " + std::to_string(len) +
                     " below kernel " + std::to_string(kernel));
  }
  const std::size_t out_len = len - kernel + 1;
  Tensor out(batched ? std::vector<std::size_t>{batch, out_len, filters}
                     : std::vector<std::size_t>{out_len, filters});
  for (std::size_t s = 0; s < batch; ++s) {
    const double* xp = xv.data() + s * len * ch;
    double* op = out.data() + s * out_len * filters;
    for (std::size_t p = 0; p < out_len; ++p) {
      double* out_row = op + p * filters;
      for (std::size_t f = 0; f < filters; ++f) out_row[f] = bias->value[f];
      for (std::size_t k = 0; k < kernel; ++k) {
        const double* x_row = xp + (p + k) * ch;
        const double* w_base = wv.data() + k * ch * filters;
        for (std::size_t c = 0; c < ch; ++c) {
          const double xval = x_row[c];
          if (xval == 0.0) continue;
          const double* w_row = w_base + c * filters;
          for (std::size_t f = 0; f < filters; ++f) {
            out_row[f] += xval * w_row[f];
          }
        }
      }
    }
  }
  return make_node(
      std::move(out), {x, w, bias},
      [x, w, bias, batch, len, ch, kernel, filters, out_len](Node& self) {
        double* gx = x->requires_grad ? x->ensure_grad().data() : nullptr;
        double* gw = w->requires_grad ? w->ensure_grad().data() : nullptr;
        double* gb = bias->requires_grad ? bias->ensure_grad().data() : nullptr;
        for (std::size_t s = 0; s < batch; ++s) {
          const double* g = self.grad.data() + s * out_len * filters;
          const double* xp = x->value.data() + s * len * ch;
          for (std::size_t p = 0; p < out_len; ++p) {
            const double* g_row = g + p * filters;
            for (std::size_t k = 0; k < kernel; ++k) {
              const double* w_base = w->value.data() + k * ch * filters;
              for (std::size_t c = 0; c < ch; ++c) {
                if (gx) {
                  const double* w_row = w_base + c * filters;
                  double acc = 0.0;
                  for (std::size_t f = 0; f < filters; ++f) {
                    acc += g_row[f] * w_row[f];
                  }
                  gx[(s * len + p + k) * ch + c] += acc;
                }
                if (gw) {
                  const double xval = xp[(p + k) * ch + c];
                  if (xval != 0.0) {
                    double* gw_row = gw + (k * ch + c) * filters;
                    for (std::size_t f = 0; f < filters; ++f) {
                      gw_row[f] += xval * g_row[f];
                    }
                  }
                }
              }
            }
            if (gb) {
              for (std::size_t f = 0; f < filters; ++f) gb[f] += g_row[f];
            }
          }
        }
      },
      "conv1d");
}

NodePtr maxpool1d(const NodePtr& x, std::size_t pool) {
  const Tensor& xv = x->value;
  if (pool == 0) throw ValueError("BadPool: pool size must be >= 1");
  if (xv.rank() != 2 && xv.rank() != 3) {
    throw ShapeError("ShapeMismatch: maxpool1d needs rank 2 or 3, got " +
                     xv.shape_string());
  }
  const bool batched = xv.rank() == 3;
  const std::size_t batch = batched ? xv.dim(0) : 1;
  const std::size_t len = batched ? xv.dim(1) : xv.dim(0);
  const std::size_t feats = batched ? xv.dim(2) : xv.dim(1);
  if (len < pool) {
    throw ShapeError("InputTooShort: length " + std::to_string(len) +
                     " below pool " + std::to_string(pool));
  }
  const std::size_t out_len = len / pool;  // remainder truncated
  Tensor out(batched ? std::vector<std::size_t>{batch, out_len, feats}
                     : std::vector<std::size_t>{out_len, feats});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t p = 0; p < out_len; ++p) {
      for (std::size_t f = 0; f < feats; ++f) {
        std::size_t best_t = p * pool;
        double best = xv[(s * len + best_t) * feats + f];
        for (std::size_t k = 1; k < pool; ++k) {
          const double v = xv[(s * len + p * pool + k) * feats + f];
          if (v > best) {  // strict: ties stay at the first index
            best = v;
            best_t = p * pool + k;
          }
        }
        const std::size_t oi = (s * out_len + p) * feats + f;
        out[oi] = best;
        (*argmax)[oi] = (s * len + best_t) * feats + f;
      }
    }
  }
  return make_node(std::move(out), {x},
                   [x, argmax](Node& self) {
                     Tensor& gx = x->ensure_grad();
                     for (std::size_t i = 0; i < self.grad.size(); ++i) {
                       gx[(*argmax)[i]] += self.grad[i];
                     }
                   },
                   "maxpool1d");
}

NodePtr global_maxpool(const NodePtr& x) {
  const Tensor& xv = x->value;
  if (xv.rank() != 2 && xv.rank() != 3) {
    throw ShapeError("ShapeMismatch: global_maxpool needs rank 2 or 3, got " +
                     xv.shape_string());
  }
  const bool batched = xv.rank() == 3;
  const std::size_t batch = batched ? xv.dim(0) : 1;
  const std::size_t len = batched ? xv.dim(1) : xv.dim(0);
  const std::size_t feats = batched ? xv.dim(2) : xv.dim(1);
  if (len == 0) throw ShapeError("InputTooShort: empty sequence");
  Tensor out(batched ? std::vector<std::size_t>{batch, feats}
                     : std::vector<std::size_t>{feats});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t f = 0; f < feats; ++f) {
      std::size_t best_t = 0;
      double best = xv[(s * len) * feats + f];
      for (std::size_t t = 1; t < len; ++t) {
        const double v = xv[(s * len + t) * feats + f];
        if (v > best) {
          best = v;
          best_t = t;
        }
      }
      out[s * feats + f] = best;
      (*argmax)[s * feats + f] = (s * len + best_t) * feats + f;
    }
  }
  return make_node(std::move(out), {x},
                   [x, argmax](Node& self) {
                     Tensor& gx = x->ensure_grad();
                     for (std::size_t i = 0; i < self.grad.size(); ++i) {
                       gx[(*argmax)[i]] += self.grad[i];
                     }
                   },
                   "global_maxpool");
}

NodePtr dropout(const NodePtr& a, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw ValueError("BadRate: dropout rate must lie in [0, 1)");
  }
  if (!training || rate == 0.0) return a;  // exact identity
  const double keep = 1.0 - rate;
  const double inv_keep = 1.0 / keep;
  auto mask = std::make_shared<std::vector<double>>(a->value.size());
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = rng.bernoulli(keep) ? inv_keep : 0.0;
    (*mask)[i] = m;
    out[i] *= m;
  }
  return make_node(std::move(out), {a},
                   [a, mask](Node& self) {
                     Tensor& ga = a->ensure_grad();
                     for (std::size_t i = 0; i < ga.size(); ++i) {
                       ga[i] += self.grad[i] * (*mask)[i];
                     }
                   },
                   "dropout");
}

NodePtr layer_norm(const NodePtr& x, const NodePtr& gamma,
                   const NodePtr& beta, double epsilon) {
  const std::size_t width = last_dim(x->value, "layer_norm");
  if (gamma->value.rank() != 1 || gamma->value.dim(0) != width ||
      beta->value.rank() != 1 || beta->value.dim(0) != width) {
    throw ShapeError("ShapeMismatch: layer_norm gamma/beta must be [" +
                     std::to_string(width) + "]");
  }
  const std::size_t rows = x->value.size() / width;
  Tensor out(x->value.shape());
  auto xhat = std::make_shared<std::vector<double>>(x->value.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = x->value.data() + r * width;
    double mu = 0.0;
    for (std::size_t j = 0; j < width; ++j) mu += in[j];
    mu /= static_cast<double>(width);
    double var = 0.0;
    for (std::size_t j = 0; j < width; ++j) {
      const double d = in[j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(width);
    const double istd = 1.0 / std::sqrt(var + epsilon);
    (*inv_std)[r] = istd;
    double* o = out.data() + r * width;
    for (std::size_t j = 0; j < width; ++j) {
      const double xh = (in[j] - mu) * istd;
      (*xhat)[r * width + j] = xh;
      o[j] = gamma->value[j] * xh + beta->value[j];
    }
  }
  return make_node(
      std::move(out), {x, gamma, beta},
      [x, gamma, beta, xhat, inv_std, rows, width](Node& self) {
        const double n = static_cast<double>(width);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* g = self.grad.data() + r * width;
          const double* xh = xhat->data() + r * width;
          if (gamma->requires_grad) {
            Tensor& gg = gamma->ensure_grad();
            for (std::size_t j = 0; j < width; ++j) gg[j] += g[j] * xh[j];
          }
          if (beta->requires_grad) {
            Tensor& gb = beta->ensure_grad();
            for (std::size_t j = 0; j < width; ++j) gb[j] += g[j];
          }
          if (x->requires_grad) {
            double sum_dxhat = 0.0;
            double sum_dxhat_xhat = 0.0;
            for (std::size_t j = 0; j < width; ++j) {
              const double dxhat = g[j] * gamma->value[j];
              sum_dxhat += dxhat;
              sum_dxhat_xhat += dxhat * xh[j];
            }
            Tensor& gx = x->ensure_grad();
            double* out_g = gx.data() + r * width;
            const double istd = (*inv_std)[r];
            for (std::size_t j = 0; j < width; ++j) {
              const double dxhat = g[j] * gamma->value[j];
              out_g[j] += istd * (dxhat - sum_dxhat / n -
                                  xh[j] * sum_dxhat_xhat / n);
            }
          }
        }
      },
      "layer_norm");
}

double bce_loss(double pred, double label) {
  if (label != 0.0 && label != 1.0) {
    throw ValueError("BadLabel: binary label must be 0 or 1");
  }
  if (!(pred > 0.0 && pred < 1.0)) {
    throw NumericError("DomainError: probability " + std::to_string(pred) +
                       " outside (0, 1)");
  }
  return -(label * std::log(pred) + (1.0 - label) * std::log(1.0 - pred));
}

NodePtr bce_mean(const NodePtr& probs, const std::vector<double>& labels) {
  const Tensor& pv = probs->value;
  const std::size_t n = pv.size();
  const bool column = pv.rank() == 2 && pv.dim(1) == 1;
  if (!(pv.rank() == 1 || column)) {
    throw ShapeError("ShapeMismatch: bce_mean wants [B] or [Bx1], got " +
                     pv.shape_string());
  }
  if (labels.size() != n) {
    throw ShapeError("ShapeMismatch: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " predictions");
  }
  if (n == 0) throw ValueError("EmptyBatch: bce_mean over zero examples");
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      throw ValueError("BadLabel: binary label must be 0 or 1");
    }
  }
  // The clamp keeps log() finite when a sigmoid saturates in double
  // precision; gradients fall through as if the clamped value were exact.
  constexpr double kEps = 1e-12;
  auto clamped = std::make_shared<std::vector<double>>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::min(std::max(pv[i], kEps), 1.0 - kEps);
    (*clamped)[i] = p;
    total -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  total /= static_cast<double>(n);
  return make_node(Tensor::scalar(total), {probs},
                   [probs, labels, clamped, n](Node& self) {
                     Tensor& gp = probs->ensure_grad();
                     const double g = self.grad[0] / static_cast<double>(n);
                     for (std::size_t i = 0; i < n; ++i) {
                       const double p = (*clamped)[i];
                       gp[i] += g * (p - labels[i]) / (p * (1.0 - p));
                     }
                   },
                   "bce_mean");
}

NodePtr masked_ce_mean(const NodePtr& logits,
                       const std::vector<std::vector<int>>& targets,
                       const std::vector<std::vector<bool>>& pad_mask) {
  const Tensor& lv = logits->value;
  if (lv.rank() != 3) {
    throw ShapeError("ShapeMismatch: masked_ce_mean wants [BxLxV], got " +
                     lv.shape_string());
  }
  const std::size_t batch = lv.dim(0);
  const std::size_t len = lv.dim(1);
  const std::size_t vocab = lv.dim(2);
  if (targets.size() != batch || pad_mask.size() != batch) {
    throw ShapeError("ShapeMismatch: target/mask batch disagrees with logits");
  }
  std::size_t valid = 0;
  for (std::size_t s = 0; s < batch; ++s) {
    if (targets[s].size() != len || pad_mask[s].size() != len) {
      throw ShapeError("ShapeMismatch: target/mask length disagrees");
    }
    for (std::size_t t = 0; t < len; ++t) {
      if (!pad_mask[s][t]) continue;
      ++valid;
      const int id = targets[s][t];
      if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
        throw ValueError("IdOutOfRange: target id " + std::to_string(id) +
                         " outside vocabulary of " + std::to_string(vocab));
      }
    }
  }
  if (valid == 0) {
    throw ValueError("NoValidTargets: every position is padding");
  }

  double total = 0.0;
  for (std::size_t s = 0; s < batch; ++s) {
    for (std::size_t t = 0; t < len; ++t) {
      if (!pad_mask[s][t]) continue;
      const double* row = lv.data() + (s * len + t) * vocab;
      double mx = row[0];
      for (std::size_t j = 1; j < vocab; ++j) mx = std::max(mx, row[j]);
      double lse = 0.0;
      for (std::size_t j = 0; j < vocab; ++j) lse += std::exp(row[j] - mx);
      lse = mx + std::log(lse);
      total += lse - row[static_cast<std::size_t>(targets[s][t])];
    }
  }
  total /= static_cast<double>(valid);

  return make_node(
      Tensor::scalar(total), {logits},
      [logits, targets, pad_mask, batch, len, vocab, valid](Node& self) {
        Tensor& gl = logits->ensure_grad();
        const double g = self.grad[0] / static_cast<double>(valid);
        for (std::size_t s = 0; s < batch; ++s) {
          for (std::size_t t = 0; t < len; ++t) {
            if (!pad_mask[s][t]) continue;
            const double* row = logits->value.data() + (s * len + t) * vocab;
            double* grow = gl.data() + (s * len + t) * vocab;
            double mx = row[0];
            for (std::size_t j = 1; j < vocab; ++j) mx = std::max(mx, row[j]);
            double denom = 0.0;
            for (std::size_t j = 0; j < vocab; ++j) {
              denom += std::exp(row[j] - mx);
            }
            for (std::size_t j = 0; j < vocab; ++j) {
              const double soft = std::exp(row[j] - mx) / denom;
              grow[j] += g * soft;
            }
            grow[static_cast<std::size_t>(targets[s][t])] -= g;
          }
        }
      },
      "masked_ce_mean");
}

}  // namespace hs::nn
