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

#include "hs/detect/model.hpp"

#include <utility>

#include "hs/common/error.hpp"

namespace hs::detect {

namespace {

using nn::Activation;
using nn::Direction;
using nn::NodePtr;

void check_positive(std::size_t value, const char* what) {
  if (value == 0) {
    throw ConfigError(std::string("ConfigMismatch: ") + what +
                      " must be >= 1");
  }
}

}  // namespace

std::string to_string(Arch arch) {
  switch (arch) {
    case Arch::kRnn: return "rnn";
    case Arch::kCnn: return "cnn";
    case Arch::kCnnRnn: return "cnn-rnn";
  }
  throw ConfigError("ConfigMismatch: unknown architecture value");
}

Arch arch_from_string(const std::string& name) {
  if (name == "rnn") return Arch::kRnn;
  if (name == "cnn") return Arch::kCnn;
  if (name == "cnn-rnn" || name == "cnn_rnn") return Arch::kCnnRnn;
  throw ConfigError("ConfigMismatch: unknown architecture '" + name + "'");
}

nlohmann::json to_json(const ClassifierConfig& cfg) {
  return nlohmann::json{
      {"arch", to_string(cfg.arch)},
      {"vocab_size", cfg.vocab_size},
      {"seq_len", cfg.seq_len},
      {"embed_dim", cfg.embed_dim},
      {"lstm_units1", cfg.lstm_units1},
      {"lstm_units2", cfg.lstm_units2},
      {"rnn_dropout", cfg.rnn_dropout},
      {"conv_filters", cfg.conv_filters},
      {"conv_kernel", cfg.conv_kernel},
      {"dense_units", cfg.dense_units},
      {"cnn_dropout", cfg.cnn_dropout},
      {"pool", cfg.pool},
      {"cnn_rnn_lstm_units", cfg.cnn_rnn_lstm_units},
      {"cnn_rnn_dropout", cfg.cnn_rnn_dropout},
      {"training",
       {{"lr", cfg.training.lr},
        {"batch_size", cfg.training.batch_size},
        {"max_epochs", cfg.training.max_epochs},
        {"early_stopping", cfg.training.early_stopping},
        {"patience", cfg.training.patience},
        {"l2_lambda", cfg.training.l2_lambda},
        {"seed", cfg.training.seed}}},
  };
}

ClassifierConfig config_from_json(const nlohmann::json& j) {
  ClassifierConfig cfg;
  try {
    cfg.arch = arch_from_string(j.at("arch").get<std::string>());
    cfg.vocab_size = j.at("vocab_size").get<std::size_t>();
    cfg.seq_len = j.at("seq_len").get<std::size_t>();
    cfg.embed_dim = j.at("embed_dim").get<std::size_t>();
    cfg.lstm_units1 = j.at("lstm_units1").get<std::size_t>();
    cfg.lstm_units2 = j.at("lstm_units2").get<std::size_t>();
    cfg.rnn_dropout = j.at("rnn_dropout").get<double>();
    cfg.conv_filters = j.at("conv_filters").get<std::size_t>();
    cfg.conv_kernel = j.at("conv_kernel").get<std::size_t>();
    cfg.dense_units = j.at("dense_units").get<std::size_t>();
    cfg.cnn_dropout = j.at("cnn_dropout").get<double>();
    cfg.pool = j.at("pool").get<std::size_t>();
    cfg.cnn_rnn_lstm_units = j.at("cnn_rnn_lstm_units").get<std::size_t>();
    cfg.cnn_rnn_dropout = j.at("cnn_rnn_dropout").get<double>();
    const nlohmann::json& t = j.at("training");
    cfg.training.lr = t.at("lr").get<double>();
    cfg.training.batch_size = t.at("batch_size").get<std::size_t>();
    cfg.training.max_epochs = t.at("max_epochs").get<std::size_t>();
    cfg.training.early_stopping = t.at("early_stopping").get<bool>();
    cfg.training.patience = t.at("patience").get<std::size_t>();
    cfg.training.l2_lambda = t.at("l2_lambda").get<double>();
    cfg.training.seed = t.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ConfigMismatch: classifier config ") +
                      e.what());
  }
  return cfg;
}

ClassifierModel::ClassifierModel(ClassifierConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  check_positive(cfg_.vocab_size, "vocab_size");
  check_positive(cfg_.seq_len, "seq_len");
  check_positive(cfg_.embed_dim, "embed_dim");

  Rng rng(seed);
  embedding_.emplace(store_, rng, "embedding", cfg_.vocab_size,
                     cfg_.embed_dim, /*freeze_pad=*/false);

  switch (cfg_.arch) {
    case Arch::kRnn: {
      check_positive(cfg_.lstm_units1, "lstm_units1");
      check_positive(cfg_.lstm_units2, "lstm_units2");
      lstm1_.emplace(store_, rng, "bilstm1", cfg_.embed_dim, cfg_.lstm_units1,
                     Direction::kBidirectional);
      lstm2_.emplace(store_, rng, "bilstm2", lstm1_->output_dim(),
                     cfg_.lstm_units2, Direction::kBidirectional);
      out_.emplace(store_, rng, "out", lstm2_->output_dim(), 1,
                   Activation::kSigmoid);
      break;
    }
    case Arch::kCnn: {
      check_positive(cfg_.conv_filters, "conv_filters");
      check_positive(cfg_.dense_units, "dense_units");
      if (cfg_.seq_len < cfg_.conv_kernel) {
        throw ShapeError("InputTooShort: seq_len " +
                         std::to_string(cfg_.seq_len) + " below kernel " +
                         std::to_string(cfg_.conv_kernel));
      }
      conv_.emplace(store_, rng, "conv", cfg_.conv_kernel, cfg_.embed_dim,
                    cfg_.conv_filters, Activation::kRelu);
      dense_mid_.emplace(store_, rng, "dense", cfg_.conv_filters,
                         cfg_.dense_units, Activation::kRelu);
      out_.emplace(store_, rng, "out", cfg_.dense_units, 1,
                   Activation::kSigmoid);
      break;
    }
    case Arch::kCnnRnn: {
      check_positive(cfg_.conv_filters, "conv_filters");
      check_positive(cfg_.pool, "pool");
      check_positive(cfg_.cnn_rnn_lstm_units, "cnn_rnn_lstm_units");
      if (cfg_.seq_len < cfg_.conv_kernel) {
        throw ShapeError("InputTooShort: seq_len " +
                         std::to_string(cfg_.seq_len) + " below kernel " +
                         std::to_string(cfg_.conv_kernel));
      }
      const std::size_t conv_len = cfg_.seq_len - cfg_.conv_kernel + 1;
      if (conv_len / cfg_.pool == 0) {
        throw ShapeError("InputTooShort: conv output " +
                         std::to_string(conv_len) +
                         " shorter than pool window " +
                         std::to_string(cfg_.pool));
      }
      conv_.emplace(store_, rng, "conv", cfg_.conv_kernel, cfg_.embed_dim,
                    cfg_.conv_filters, Activation::kRelu);
      lstm1_.emplace(store_, rng, "bilstm", cfg_.conv_filters,
                     cfg_.cnn_rnn_lstm_units, Direction::kBidirectional);
      lstm_final_.emplace(store_, rng, "lstm", lstm1_->output_dim(),
                          cfg_.cnn_rnn_lstm_units);
      out_.emplace(store_, rng, "out", cfg_.cnn_rnn_lstm_units, 1,
                   Activation::kSigmoid);
      break;
    }
  }
}

NodePtr ClassifierModel::head(const NodePtr& features, bool training,
                              Rng* rng, double rate) const {
  NodePtr x = features;
  if (training) {
    if (rng == nullptr) {
      throw ConfigError("ConfigMismatch: training forward needs an rng");
    }
    x = nn::dropout(x, rate, true, *rng);
  }
  return out_->forward(x);
}

NodePtr ClassifierModel::forward(const std::vector<std::vector<int>>& ids,
                                 bool training, Rng* rng) const {
  if (ids.empty()) {
    throw ValueError("EmptySplit: no rows to run the classifier on");
  }
  for (const auto& row : ids) {
    if (row.size() != cfg_.seq_len) {
      throw ConfigError("ConfigMismatch: expected rows of length " +
                        std::to_string(cfg_.seq_len) + ", got " +
                        std::to_string(row.size()));
    }
  }
  if (training && rng == nullptr) {
    throw ConfigError("ConfigMismatch: training forward needs an rng");
  }

  NodePtr x = embedding_->forward(ids);
  switch (cfg_.arch) {
    case Arch::kRnn: {
      x = lstm1_->forward(x, /*return_sequences=*/true);
      x = lstm2_->forward(x, /*return_sequences=*/false);
      return head(x, training, rng, cfg_.rnn_dropout);
    }
    case Arch::kCnn: {
      if (training) x = nn::dropout(x, cfg_.cnn_dropout, true, *rng);
      x = conv_->forward(x);
      x = nn::global_maxpool(x);
      x = dense_mid_->forward(x);
      return head(x, training, rng, cfg_.cnn_dropout);
    }
    case Arch::kCnnRnn: {
      if (training) x = nn::dropout(x, cfg_.cnn_rnn_dropout, true, *rng);
      x = conv_->forward(x);
      x = nn::maxpool1d(x, cfg_.pool);
      if (training) x = nn::dropout(x, cfg_.cnn_rnn_dropout, true, *rng);
      x = lstm1_->forward(x, /*return_sequences=*/true);
      x = lstm_final_->forward(x, /*return_sequences=*/false);
      return head(x, training, rng, cfg_.cnn_rnn_dropout);
    }
  }
  throw ConfigError("ConfigMismatch: unknown architecture value");
}

std::vector<double> ClassifierModel::predict_batch(
    const std::vector<std::vector<int>>& ids) const {
  NodePtr probs = forward(ids, /*training=*/false);
  return probs->value.values();
}

double ClassifierModel::predict_probability(
    const std::vector<int>& ids) const {
  return predict_batch({ids})[0];
}

}  // namespace hs::detect
