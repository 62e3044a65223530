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

#include "hs/maskgen/masker.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include "hs/common/error.hpp"
#include "hs/nn/checkpoint.hpp"
#include "hs/nn/optimizer.hpp"

namespace hs::maskgen {

namespace {

struct BatchView {
  std::vector<std::vector<int>> src;
  std::vector<std::vector<int>> dec_input;
  std::vector<std::vector<int>> labels;
  std::vector<std::vector<bool>> label_mask;
};

BatchView gather(const PreparedPairs& data,
                 const std::vector<std::size_t>& order, std::size_t start,
                 std::size_t stop) {
  BatchView view;
  view.src.reserve(stop - start);
  view.dec_input.reserve(stop - start);
  view.labels.reserve(stop - start);
  view.label_mask.reserve(stop - start);
  for (std::size_t k = start; k < stop; ++k) {
    const std::size_t i = order[k];
    view.src.push_back(data.src[i]);
    view.dec_input.push_back(data.dec_input[i]);
    view.labels.push_back(data.labels[i]);
    view.label_mask.push_back(data.label_mask[i]);
  }
  return view;
}

double dataset_loss(const MaskerModel& model, const PreparedPairs& data,
                    std::size_t batch_size) {
  double total = 0.0;
  std::size_t counted = 0;
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t stop = std::min(data.size(), start + batch_size);
    BatchView view = gather(data, order, start, stop);
    nn::NodePtr logits =
        model.forward(view.src, view.dec_input, /*training=*/false);
    nn::NodePtr loss =
        nn::masked_ce_mean(logits, view.labels, view.label_mask);
    total += loss->value[0] * static_cast<double>(stop - start);
    counted += stop - start;
  }
  return total / static_cast<double>(counted);
}

std::vector<nn::Tensor> snapshot(const nn::ParameterStore& store) {
  std::vector<nn::Tensor> values;
  values.reserve(store.all().size());
  for (const auto& p : store.all()) values.push_back(p->value());
  return values;
}

void restore(nn::ParameterStore& store, const std::vector<nn::Tensor>& vals) {
  for (std::size_t i = 0; i < vals.size(); ++i) {
    store.all()[i]->value() = vals[i];
  }
}

}  // namespace

MaskerTrainResult train_masker(MaskerModel& model, const PreparedPairs& train,
                               const PreparedPairs& dev) {
  if (train.size() == 0) {
    throw ValueError("EmptySplit: train split is empty");
  }
  if (dev.size() == 0) {
    throw ValueError("EmptySplit: dev split is empty");
  }
  const Seq2SeqConfig& cfg = model.config();
  if (cfg.batch_size == 0) {
    throw ConfigError("ConfigMismatch: batch_size must be >= 1");
  }

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;
  nn::Adam opt(model.params().all(), adam_cfg);

  Rng rng(cfg.seed);
  Rng shuffle_rng = rng.fork(1);
  Rng dropout_rng = rng.fork(2);

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  MaskerTrainResult result;
  double best_dev = std::numeric_limits<double>::infinity();
  std::vector<nn::Tensor> best_weights = snapshot(model.params());
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      BatchView view = gather(train, order, start, stop);

      opt.zero_grads();
      nn::NodePtr logits =
          model.forward(view.src, view.dec_input, /*training=*/true,
                        &dropout_rng);
      nn::NodePtr loss =
          nn::masked_ce_mean(logits, view.labels, view.label_mask);
      if (cfg.l2_lambda > 0.0) {
        loss = nn::add(loss,
                       nn::l2_penalty(model.params().all(), cfg.l2_lambda));
      }
      nn::backward(loss);
      opt.step();
      epoch_loss += loss->value[0] * static_cast<double>(stop - start);
    }

    MaskerEpochStats stats;
    stats.train_loss = epoch_loss / static_cast<double>(train.size());
    stats.dev_loss = dataset_loss(model, dev, cfg.batch_size);
    result.history.push_back(stats);
    result.epochs_run = epoch + 1;

    if (stats.dev_loss < best_dev - 1e-12) {
      best_dev = stats.dev_loss;
      best_weights = snapshot(model.params());
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
      if (since_best >= cfg.patience) {
        result.stopped_early = true;
        break;
      }
    }
  }

  restore(model.params(), best_weights);
  return result;
}

DecodeResult greedy_decode(const MaskerModel& model,
                           const text::Vocabulary& source_vocab,
                           const text::Vocabulary& target_vocab,
                           const std::string& source_text,
                           std::size_t max_len) {
  const Seq2SeqConfig& cfg = model.config();
  const std::vector<std::vector<int>> src = {
      text::encode(source_text, source_vocab, cfg.seq_len)};

  DecodeResult result;
  std::vector<int> prefix = {text::Vocabulary::kStartId};
  const std::size_t budget = std::min(max_len, cfg.seq_len);
  for (std::size_t step = 0; step < budget; ++step) {
    std::vector<int> dec_input(cfg.seq_len, text::Vocabulary::kPadId);
    for (std::size_t i = 0; i < prefix.size() && i < cfg.seq_len; ++i) {
      dec_input[i] = prefix[i];
    }
    nn::NodePtr logits = model.forward(src, {dec_input}, /*training=*/false);
    // Logits row for the last real prefix position predicts the next token.
    const std::size_t row = prefix.size() - 1;
    const nn::Tensor& value = logits->value;
    const std::size_t v = cfg.target_vocab_size;
    const double* scores = value.data() + row * v;
    std::size_t best = 0;
    for (std::size_t id = 1; id < v; ++id) {
      if (scores[id] > scores[best]) best = id;  // ties keep the lowest id
    }
    const int token = static_cast<int>(best);
    if (token == text::Vocabulary::kEndId) break;
    result.token_ids.push_back(token);
    if (token == text::Vocabulary::kUnkId) ++result.unk_count;
    prefix.push_back(token);
    if (prefix.size() >= cfg.seq_len) break;  // decoder window is full
  }
  result.text = text::decode(result.token_ids, target_vocab);
  return result;
}

metrics::BleuReport evaluate_masker(
    const MaskerModel& model, const text::Vocabulary& source_vocab,
    const text::Vocabulary& target_vocab,
    const std::vector<corpus::ParallelPair>& pairs) {
  if (pairs.empty()) {
    throw ValueError("EmptySplit: no pairs to evaluate");
  }
  metrics::TokenizedCorpus candidates;
  metrics::TokenizedCorpus references;
  candidates.reserve(pairs.size());
  references.reserve(pairs.size());
  std::size_t unk_total = 0;
  for (const corpus::ParallelPair& pair : pairs) {
    DecodeResult decoded = greedy_decode(model, source_vocab, target_vocab,
                                         pair.source,
                                         model.config().seq_len);
    unk_total += decoded.unk_count;
    candidates.push_back(metrics::whitespace_tokens(decoded.text));
    references.push_back(metrics::whitespace_tokens(pair.target));
  }
  metrics::BleuReport report = metrics::bleu(candidates, references);
  report.unk_count = static_cast<long long>(unk_total);
  return report;
}

void save_masker(const std::string& path, const MaskerModel& model,
                 const text::Vocabulary& source_vocab,
                 const text::Vocabulary& target_vocab) {
  nlohmann::json manifest{
      {"kind", "masker"},
      {"config", to_json(model.config())},
      {"source_vocab", source_vocab.token_list()},
      {"target_vocab", target_vocab.token_list()},
  };
  nn::save_checkpoint(path, manifest.dump(), model.params().all());
}

LoadedMasker load_masker(const std::string& path) {
  nn::CheckpointData data = nn::load_checkpoint(path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(data.manifest_json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("FormatError: checkpoint manifest ") +
                    e.what());
  }
  if (manifest.value("kind", "") != "masker") {
    throw DataError("FormatError: checkpoint is not a masker");
  }
  LoadedMasker loaded;
  loaded.source_vocab = text::Vocabulary::from_tokens(
      manifest.at("source_vocab").get<std::vector<std::string>>());
  loaded.target_vocab = text::Vocabulary::from_tokens(
      manifest.at("target_vocab").get<std::vector<std::string>>());
  Seq2SeqConfig cfg = seq2seq_config_from_json(manifest.at("config"));
  loaded.model = std::make_unique<MaskerModel>(cfg, cfg.seed);
  nn::restore_parameters(data, loaded.model->params().all());
  return loaded;
}

}  // namespace hs::maskgen
