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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hs/common/rng.hpp"
#include "hs/nn/graph.hpp"
#include "hs/nn/layers.hpp"

namespace hs::detect {

enum class Arch { kRnn, kCnn, kCnnRnn };

std::string to_string(Arch arch);
Arch arch_from_string(const std::string& name);  // ConfigError on unknown

struct TrainingPolicy {
  double lr = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t max_epochs = 30;
  bool early_stopping = false;
  std::size_t patience = 2;
  double l2_lambda = 0.0;
  std::uint64_t seed = 1;
};

// Defaults reproduce the reference architectures; tests shrink the widths
// so training stays fast on one core.
struct ClassifierConfig {
  Arch arch = Arch::kRnn;
  std::size_t vocab_size = 0;  // callers set this from their vocabulary
  std::size_t seq_len = 25;
  std::size_t embed_dim = 300;

  // RNN: two stacked bidirectional LSTMs, then a sigmoid head.
  std::size_t lstm_units1 = 128;
  std::size_t lstm_units2 = 64;
  double rnn_dropout = 0.5;

  // CNN: one wide convolution, global max pooling, one hidden dense.
  std::size_t conv_filters = 128;
  std::size_t conv_kernel = 7;
  std::size_t dense_units = 128;
  double cnn_dropout = 0.5;

  // CNN-RNN: convolution and pooling feeding a bidirectional LSTM stack.
  std::size_t pool = 2;
  std::size_t cnn_rnn_lstm_units = 128;
  double cnn_rnn_dropout = 0.2;

  TrainingPolicy training;
};

nlohmann::json to_json(const ClassifierConfig& cfg);
ClassifierConfig config_from_json(const nlohmann::json& j);

// One classifier instance: parameters plus the wiring for its architecture.
// Construction draws every initial weight from `seed`, so two models built
// from equal (config, seed) are bit-identical.
class ClassifierModel {
 public:
  ClassifierModel(ClassifierConfig cfg, std::uint64_t seed);

  ClassifierModel(const ClassifierModel&) = delete;
  ClassifierModel& operator=(const ClassifierModel&) = delete;

  // ids is [B x seq_len]; anything else throws ConfigError. rng is required
  // when training (dropout); inference ignores it.
  nn::NodePtr forward(const std::vector<std::vector<int>>& ids, bool training,
                      Rng* rng = nullptr) const;

  // Probabilities for a batch, inference mode. Output is flat [B].
  std::vector<double> predict_batch(
      const std::vector<std::vector<int>>& ids) const;
  double predict_probability(const std::vector<int>& ids) const;

  const ClassifierConfig& config() const { return cfg_; }
  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }

 private:
  nn::NodePtr head(const nn::NodePtr& features, bool training,
                   Rng* rng, double rate) const;

  ClassifierConfig cfg_;
  nn::ParameterStore store_;
  std::optional<nn::Embedding> embedding_;
  std::optional<nn::Lstm> lstm1_;
  std::optional<nn::Lstm> lstm2_;
  std::optional<nn::LstmLayer> lstm_final_;
  std::optional<nn::Conv1dLayer> conv_;
  std::optional<nn::Dense> dense_mid_;
  std::optional<nn::Dense> out_;
};

}  // namespace hs::detect
