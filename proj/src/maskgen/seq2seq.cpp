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

#include "hs/maskgen/seq2seq.hpp"

#include <utility>

#include "hs/common/error.hpp"

namespace hs::maskgen {

namespace {

using nn::Activation;
using nn::NodePtr;
using nn::Tensor;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("ConfigMismatch: " + message);
}

}  // namespace

nlohmann::json to_json(const Seq2SeqConfig& cfg) {
  return nlohmann::json{
      {"source_vocab_size", cfg.source_vocab_size},
      {"target_vocab_size", cfg.target_vocab_size},
      {"seq_len", cfg.seq_len},
      {"embed_dim", cfg.embed_dim},
      {"heads", cfg.heads},
      {"ff_dim", cfg.ff_dim},
      {"encoder_layers", cfg.encoder_layers},
      {"decoder_layers", cfg.decoder_layers},
      {"dropout", cfg.dropout},
      {"lr", cfg.lr},
      {"batch_size", cfg.batch_size},
      {"max_epochs", cfg.max_epochs},
      {"patience", cfg.patience},
      {"l2_lambda", cfg.l2_lambda},
      {"seed", cfg.seed},
  };
}

Seq2SeqConfig seq2seq_config_from_json(const nlohmann::json& j) {
  Seq2SeqConfig cfg;
  try {
    cfg.source_vocab_size = j.at("source_vocab_size").get<std::size_t>();
    cfg.target_vocab_size = j.at("target_vocab_size").get<std::size_t>();
    cfg.seq_len = j.at("seq_len").get<std::size_t>();
    cfg.embed_dim = j.at("embed_dim").get<std::size_t>();
    cfg.heads = j.at("heads").get<std::size_t>();
    cfg.ff_dim = j.at("ff_dim").get<std::size_t>();
    cfg.encoder_layers = j.at("encoder_layers").get<std::size_t>();
    cfg.decoder_layers = j.at("decoder_layers").get<std::size_t>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.lr = j.at("lr").get<double>();
    cfg.batch_size = j.at("batch_size").get<std::size_t>();
    cfg.max_epochs = j.at("max_epochs").get<std::size_t>();
    cfg.patience = j.at("patience").get<std::size_t>();
    cfg.l2_lambda = j.at("l2_lambda").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ConfigMismatch: seq2seq config ") +
                      e.what());
  }
  return cfg;
}

Tensor causal_mask(std::size_t n) {
  if (n == 0) throw ValueError("BadSize: causal mask needs n >= 1");
  Tensor mask({n, n});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) mask.at(i, j) = 1.0;
  }
  return mask;
}

Tensor source_attention_mask(const std::vector<std::vector<int>>& src_ids,
                             std::size_t query_len) {
  if (src_ids.empty()) {
    throw ValueError("EmptyPairList: no source rows for the mask");
  }
  const std::size_t batch = src_ids.size();
  const std::size_t src_len = src_ids[0].size();
  Tensor mask({batch, query_len, src_len});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t k = 0; k < src_len; ++k) {
      if (src_ids[b][k] == text::Vocabulary::kPadId) continue;
      for (std::size_t q = 0; q < query_len; ++q) {
        mask.at(b, q, k) = 1.0;
      }
    }
  }
  return mask;
}

PreparedPairs prepare_pairs(const std::vector<corpus::ParallelPair>& pairs,
                            const text::Vocabulary& source_vocab,
                            const text::Vocabulary& target_vocab,
                            std::size_t seq_len) {
  if (pairs.empty()) {
    throw ValueError("EmptyPairList: nothing to prepare");
  }
  if (!target_vocab.has_start_end()) {
    throw ValueError(
        "MissingSpecials: target vocabulary lacks [start]/[end]");
  }
  if (seq_len == 0) throw ValueError("BadLength: seq_len must be >= 1");

  PreparedPairs out;
  out.src.reserve(pairs.size());
  out.dec_input.reserve(pairs.size());
  out.labels.reserve(pairs.size());
  out.label_mask.reserve(pairs.size());
  for (const corpus::ParallelPair& pair : pairs) {
    out.src.push_back(text::encode(pair.source, source_vocab, seq_len));

    const std::string wrapped = text::Vocabulary::start_token() + " " +
                                pair.target + " " +
                                text::Vocabulary::end_token();
    std::vector<int> target_ids =
        text::encode(wrapped, target_vocab, seq_len + 1);
    std::vector<int> dec_input(target_ids.begin(), target_ids.end() - 1);
    std::vector<int> labels(target_ids.begin() + 1, target_ids.end());
    std::vector<bool> mask(seq_len);
    for (std::size_t t = 0; t < seq_len; ++t) {
      mask[t] = labels[t] != text::Vocabulary::kPadId;
    }
    out.dec_input.push_back(std::move(dec_input));
    out.labels.push_back(std::move(labels));
    out.label_mask.push_back(std::move(mask));
  }
  return out;
}

MaskerModel::EncoderBlock::EncoderBlock(nn::ParameterStore& store, Rng& rng,
                                        const std::string& prefix,
                                        const Seq2SeqConfig& cfg)
    : attn(store, rng, prefix + ".attn", cfg.embed_dim, cfg.heads),
      ff1(store, rng, prefix + ".ff1", cfg.embed_dim, cfg.ff_dim,
          Activation::kRelu),
      ff2(store, rng, prefix + ".ff2", cfg.ff_dim, cfg.embed_dim,
          Activation::kNone),
      ln1(store, prefix + ".ln1", cfg.embed_dim),
      ln2(store, prefix + ".ln2", cfg.embed_dim) {}

MaskerModel::DecoderBlock::DecoderBlock(nn::ParameterStore& store, Rng& rng,
                                        const std::string& prefix,
                                        const Seq2SeqConfig& cfg)
    : self_attn(store, rng, prefix + ".self", cfg.embed_dim, cfg.heads),
      cross_attn(store, rng, prefix + ".cross", cfg.embed_dim, cfg.heads),
      ff1(store, rng, prefix + ".ff1", cfg.embed_dim, cfg.ff_dim,
          Activation::kRelu),
      ff2(store, rng, prefix + ".ff2", cfg.ff_dim, cfg.embed_dim,
          Activation::kNone),
      ln1(store, prefix + ".ln1", cfg.embed_dim),
      ln2(store, prefix + ".ln2", cfg.embed_dim),
      ln3(store, prefix + ".ln3", cfg.embed_dim) {}

MaskerModel::MaskerModel(Seq2SeqConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  require(cfg_.source_vocab_size >= 1, "source_vocab_size must be >= 1");
  require(cfg_.target_vocab_size >= 1, "target_vocab_size must be >= 1");
  require(cfg_.seq_len >= 1, "seq_len must be >= 1");
  require(cfg_.embed_dim >= 1, "embed_dim must be >= 1");
  require(cfg_.heads >= 1, "heads must be >= 1");
  require(cfg_.ff_dim >= 1, "ff_dim must be >= 1");
  require(cfg_.encoder_layers >= 1, "encoder_layers must be >= 1");
  require(cfg_.decoder_layers >= 1, "decoder_layers must be >= 1");
  if (cfg_.embed_dim % cfg_.heads != 0) {
    throw ShapeError("DimNotDivisible: embed_dim " +
                     std::to_string(cfg_.embed_dim) + " by heads " +
                     std::to_string(cfg_.heads));
  }

  Rng rng(seed);
  src_embed_.emplace(store_, rng, "src_embed", cfg_.source_vocab_size,
                     cfg_.embed_dim);
  src_pos_.emplace(store_, rng, "src_pos", cfg_.seq_len, cfg_.embed_dim);
  for (std::size_t i = 0; i < cfg_.encoder_layers; ++i) {
    encoder_.emplace_back(store_, rng, "enc" + std::to_string(i), cfg_);
  }
  tgt_embed_.emplace(store_, rng, "tgt_embed", cfg_.target_vocab_size,
                     cfg_.embed_dim);
  tgt_pos_.emplace(store_, rng, "tgt_pos", cfg_.seq_len, cfg_.embed_dim);
  for (std::size_t i = 0; i < cfg_.decoder_layers; ++i) {
    decoder_.emplace_back(store_, rng, "dec" + std::to_string(i), cfg_);
  }
  head_.emplace(store_, rng, "head", cfg_.embed_dim, cfg_.target_vocab_size,
                Activation::kNone);
}

NodePtr MaskerModel::maybe_dropout(const NodePtr& x, bool training,
                                   Rng* rng) const {
  if (!training || cfg_.dropout <= 0.0) return x;
  return nn::dropout(x, cfg_.dropout, true, *rng);
}

void MaskerModel::check_rows(const std::vector<std::vector<int>>& ids,
                             const char* what) const {
  if (ids.empty()) {
    throw ValueError(std::string("EmptyPairList: no ") + what + " rows");
  }
  for (const auto& row : ids) {
    if (row.size() != cfg_.seq_len) {
      throw ConfigError("ConfigMismatch: " + std::string(what) +
                        " rows must have length " +
                        std::to_string(cfg_.seq_len) + ", got " +
                        std::to_string(row.size()));
    }
  }
}

NodePtr MaskerModel::encode(const std::vector<std::vector<int>>& src_ids,
                            bool training, Rng* rng) const {
  check_rows(src_ids, "source");
  if (training && rng == nullptr) {
    throw ConfigError("ConfigMismatch: training forward needs an rng");
  }
  const Tensor src_mask = source_attention_mask(src_ids, cfg_.seq_len);
  NodePtr x = src_pos_->forward(src_embed_->forward(src_ids));
  x = maybe_dropout(x, training, rng);
  for (const EncoderBlock& block : encoder_) {
    NodePtr attn = block.attn.forward(x, x, x, &src_mask);
    attn = maybe_dropout(attn, training, rng);
    x = block.ln1.forward(nn::add(x, attn));
    NodePtr ff = block.ff2.forward(block.ff1.forward(x));
    ff = maybe_dropout(ff, training, rng);
    x = block.ln2.forward(nn::add(x, ff));
  }
  return x;
}

NodePtr MaskerModel::forward(const std::vector<std::vector<int>>& src_ids,
                             const std::vector<std::vector<int>>& dec_ids,
                             bool training, Rng* rng) const {
  check_rows(src_ids, "source");
  check_rows(dec_ids, "decoder");
  if (src_ids.size() != dec_ids.size()) {
    throw ConfigError("ConfigMismatch: source batch " +
                      std::to_string(src_ids.size()) + " vs decoder batch " +
                      std::to_string(dec_ids.size()));
  }
  if (training && rng == nullptr) {
    throw ConfigError("ConfigMismatch: training forward needs an rng");
  }

  NodePtr memory = encode(src_ids, training, rng);
  const Tensor causal = causal_mask(cfg_.seq_len);
  const Tensor cross_mask = source_attention_mask(src_ids, cfg_.seq_len);

  NodePtr y = tgt_pos_->forward(tgt_embed_->forward(dec_ids));
  y = maybe_dropout(y, training, rng);
  for (const DecoderBlock& block : decoder_) {
    NodePtr self = block.self_attn.forward(y, y, y, &causal);
    self = maybe_dropout(self, training, rng);
    y = block.ln1.forward(nn::add(y, self));
    NodePtr cross = block.cross_attn.forward(y, memory, memory, &cross_mask);
    cross = maybe_dropout(cross, training, rng);
    y = block.ln2.forward(nn::add(y, cross));
    NodePtr ff = block.ff2.forward(block.ff1.forward(y));
    ff = maybe_dropout(ff, training, rng);
    y = block.ln3.forward(nn::add(y, ff));
  }
  return head_->forward(y);
}

}  // namespace hs::maskgen
