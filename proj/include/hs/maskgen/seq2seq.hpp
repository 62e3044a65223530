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
#include <string>
#include <vector>

#include <json.hpp>

#include "hs/common/rng.hpp"
#include "hs/corpus/dataset.hpp"
#include "hs/nn/graph.hpp"
#include "hs/nn/layers.hpp"
#include "hs/text/vocab.hpp"

namespace hs::maskgen {

// Source and target sides carry independent vocabularies; the target side
// needs [start]/[end]. embed_dim must be divisible by heads.
struct Seq2SeqConfig {
  std::size_t source_vocab_size = 0;
  std::size_t target_vocab_size = 0;
  std::size_t seq_len = 25;
  std::size_t embed_dim = 256;
  std::size_t heads = 8;
  std::size_t ff_dim = 2048;
  std::size_t encoder_layers = 1;
  std::size_t decoder_layers = 1;
  double dropout = 0.1;

  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::size_t patience = 2;
  double l2_lambda = 0.0;
  std::uint64_t seed = 1;
};

nlohmann::json to_json(const Seq2SeqConfig& cfg);
Seq2SeqConfig seq2seq_config_from_json(const nlohmann::json& j);

// Allow-mask: position i may attend to positions j <= i.
nn::Tensor causal_mask(std::size_t n);

// [B x query_len x src_len] allow-mask blocking PAD source positions on the
// key side, shared by encoder self-attention and decoder cross-attention.
nn::Tensor source_attention_mask(const std::vector<std::vector<int>>& src_ids,
                                 std::size_t query_len);

// Teacher-forcing views of a parallel corpus. decoder labels are decoder
// inputs shifted left by one; label_mask marks positions that count toward
// the loss (PAD excluded).
struct PreparedPairs {
  std::vector<std::vector<int>> src;         // [N x seq_len]
  std::vector<std::vector<int>> dec_input;   // [N x seq_len]
  std::vector<std::vector<int>> labels;      // [N x seq_len]
  std::vector<std::vector<bool>> label_mask; // [N x seq_len]

  std::size_t size() const { return src.size(); }
};

// Targets are wrapped as [start] <tokens> [end] and encoded to seq_len+1
// before the shift. Throws ValueError EmptyPairList on no pairs and
// MissingSpecials when target_vocab lacks [start]/[end].
PreparedPairs prepare_pairs(const std::vector<corpus::ParallelPair>& pairs,
                            const text::Vocabulary& source_vocab,
                            const text::Vocabulary& target_vocab,
                            std::size_t seq_len);

// Encoder-decoder transformer over fixed-length id rows. Construction
// draws all weights from `seed`; equal (config, seed) builds are
// bit-identical.
class MaskerModel {
 public:
  MaskerModel(Seq2SeqConfig cfg, std::uint64_t seed);

  MaskerModel(const MaskerModel&) = delete;
  MaskerModel& operator=(const MaskerModel&) = delete;

  // src_ids/dec_ids are [B x seq_len]; returns target logits [B x seq_len
  // x target_vocab_size]. rng is required when training.
  nn::NodePtr forward(const std::vector<std::vector<int>>& src_ids,
                      const std::vector<std::vector<int>>& dec_ids,
                      bool training, Rng* rng = nullptr) const;

  // Encoder states [B x seq_len x embed_dim] for inspection and tests.
  nn::NodePtr encode(const std::vector<std::vector<int>>& src_ids,
                     bool training, Rng* rng = nullptr) const;

  const Seq2SeqConfig& config() const { return cfg_; }
  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }

 private:
  struct EncoderBlock {
    nn::MultiHeadAttention attn;
    nn::Dense ff1;
    nn::Dense ff2;
    nn::LayerNormLayer ln1;
    nn::LayerNormLayer ln2;
    EncoderBlock(nn::ParameterStore& store, Rng& rng,
                 const std::string& prefix, const Seq2SeqConfig& cfg);
  };
  struct DecoderBlock {
    nn::MultiHeadAttention self_attn;
    nn::MultiHeadAttention cross_attn;
    nn::Dense ff1;
    nn::Dense ff2;
    nn::LayerNormLayer ln1;
    nn::LayerNormLayer ln2;
    nn::LayerNormLayer ln3;
    DecoderBlock(nn::ParameterStore& store, Rng& rng,
                 const std::string& prefix, const Seq2SeqConfig& cfg);
  };

  nn::NodePtr maybe_dropout(const nn::NodePtr& x, bool training,
                            Rng* rng) const;
  void check_rows(const std::vector<std::vector<int>>& ids,
                  const char* what) const;

  Seq2SeqConfig cfg_;
  nn::ParameterStore store_;
  std::vector<EncoderBlock> encoder_;
  std::vector<DecoderBlock> decoder_;
  // Layers without default construction live behind optionals so the
  // constructor can build them in seed order.
  std::optional<nn::Embedding> src_embed_;
  std::optional<nn::PositionalEmbedding> src_pos_;
  std::optional<nn::Embedding> tgt_embed_;
  std::optional<nn::PositionalEmbedding> tgt_pos_;
  std::optional<nn::Dense> head_;
};

}  // namespace hs::maskgen
