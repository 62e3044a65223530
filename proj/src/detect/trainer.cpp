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

#include "hs/detect/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hs/common/error.hpp"
#include "hs/nn/checkpoint.hpp"
#include "hs/nn/optimizer.hpp"
#include "hs/text/normalize.hpp"

namespace hs::detect {

namespace {

constexpr std::size_t kEvalBatch = 256;

// Dev losses use the same clamped log as bce_mean so saturated outputs
// cannot poison the early-stopping signal.
double clamped_bce(double p, double y) {
  const double eps = 1e-12;
  p = std::min(std::max(p, eps), 1.0 - eps);
  return y > 0.5 ? -std::log(p) : -std::log(1.0 - p);
}

struct DevScore {
  double loss = 0.0;
  double accuracy = 0.0;
};

DevScore score_split(const ClassifierModel& model,
                     const EncodedDataset& data) {
  DevScore score;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < data.size(); start += kEvalBatch) {
    const std::size_t stop = std::min(data.size(), start + kEvalBatch);
    std::vector<std::vector<int>> batch(data.ids.begin() + start,
                                        data.ids.begin() + stop);
    std::vector<double> probs = model.predict_batch(batch);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double target = data.targets[start + i];
      score.loss += clamped_bce(probs[i], target);
      const bool predicted_off = probs[i] > 0.5;
      if (predicted_off == (target > 0.5)) ++correct;
    }
  }
  score.loss /= static_cast<double>(data.size());
  score.accuracy =
      static_cast<double>(correct) / static_cast<double>(data.size());
  return score;
}

}  // namespace

EncodedDataset encode_examples(
    const std::vector<corpus::LabeledExample>& examples,
    const text::Vocabulary& vocab, std::size_t seq_len) {
  EncodedDataset out;
  out.ids.reserve(examples.size());
  out.targets.reserve(examples.size());
  out.labels.reserve(examples.size());
  for (const corpus::LabeledExample& ex : examples) {
    out.ids.push_back(text::encode(ex.text, vocab, seq_len));
    out.targets.push_back(ex.label == Label::kOffensive ? 1.0 : 0.0);
    out.labels.push_back(ex.label);
  }
  return out;
}

TrainResult train_classifier(ClassifierModel& model,
                             const EncodedDataset& train,
                             const EncodedDataset& dev,
                             const TrainingPolicy& policy) {
  if (train.size() == 0) {
    throw ValueError("EmptySplit: train split is empty");
  }
  if (policy.early_stopping && dev.size() == 0) {
    throw ValueError("EmptySplit: early stopping needs a dev split");
  }
  if (policy.batch_size == 0) {
    throw ConfigError("ConfigMismatch: batch_size must be >= 1");
  }

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = policy.lr;
  nn::Adam opt(model.params().all(), adam_cfg);

  Rng rng(policy.seed);
  Rng shuffle_rng = rng.fork(1);
  Rng dropout_rng = rng.fork(2);

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  double best_dev = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < policy.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += policy.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + policy.batch_size);
      std::vector<std::vector<int>> ids;
      std::vector<double> targets;
      ids.reserve(stop - start);
      targets.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        ids.push_back(train.ids[order[k]]);
        targets.push_back(train.targets[order[k]]);
      }

      opt.zero_grads();
      nn::NodePtr probs = model.forward(ids, /*training=*/true, &dropout_rng);
      nn::NodePtr loss = nn::bce_mean(probs, targets);
      if (policy.l2_lambda > 0.0) {
        loss = nn::add(loss, nn::l2_penalty(model.params().all(),
                                            policy.l2_lambda));
      }
      nn::backward(loss);
      opt.step();
      epoch_loss += loss->value[0] * static_cast<double>(stop - start);
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / static_cast<double>(train.size());
    if (dev.size() > 0) {
      DevScore dev_score = score_split(model, dev);
      stats.dev_loss = dev_score.loss;
      stats.dev_accuracy = dev_score.accuracy;
    }
    result.history.push_back(stats);
    result.epochs_run = epoch + 1;

    if (policy.early_stopping) {
      if (stats.dev_loss < best_dev - 1e-12) {
        best_dev = stats.dev_loss;
        since_best = 0;
      } else {
        ++since_best;
        if (since_best >= policy.patience) {
          result.stopped_early = true;
          break;
        }
      }
    }
  }
  return result;
}

Label label_from_probability(double probability) {
  return probability > 0.5 ? Label::kOffensive : Label::kNotOffensive;
}

std::pair<double, Label> predict(const ClassifierModel& model,
                                 const text::Vocabulary& vocab,
                                 const std::string& raw_text) {
  const std::string clean = text::preprocess(raw_text);
  const std::vector<int> ids =
      text::encode(clean, vocab, model.config().seq_len);
  const double p = model.predict_probability(ids);
  return {p, label_from_probability(p)};
}

metrics::EvalReport evaluate_classifier(const ClassifierModel& model,
                                        const EncodedDataset& test) {
  if (test.size() == 0) {
    throw ValueError("EmptySplit: test split is empty");
  }
  std::vector<Label> preds;
  preds.reserve(test.size());
  for (std::size_t start = 0; start < test.size(); start += kEvalBatch) {
    const std::size_t stop = std::min(test.size(), start + kEvalBatch);
    std::vector<std::vector<int>> batch(test.ids.begin() + start,
                                        test.ids.begin() + stop);
    for (double p : model.predict_batch(batch)) {
      preds.push_back(label_from_probability(p));
    }
  }
  return metrics::prf1(metrics::confusion(preds, test.labels));
}

void save_classifier(const std::string& path, const ClassifierModel& model,
                     const text::Vocabulary& vocab) {
  nlohmann::json manifest{
      {"kind", "classifier"},
      {"config", to_json(model.config())},
      {"vocab", vocab.token_list()},
  };
  nn::save_checkpoint(path, manifest.dump(), model.params().all());
}

LoadedClassifier load_classifier(const std::string& path) {
  nn::CheckpointData data = nn::load_checkpoint(path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(data.manifest_json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("FormatError: checkpoint manifest ") +
                    e.what());
  }
  if (manifest.value("kind", "") != "classifier") {
    throw DataError("FormatError: checkpoint is not a classifier");
  }
  LoadedClassifier loaded;
  loaded.vocab = text::Vocabulary::from_tokens(
      manifest.at("vocab").get<std::vector<std::string>>());
  ClassifierConfig cfg = config_from_json(manifest.at("config"));
  loaded.model =
      std::make_unique<ClassifierModel>(cfg, cfg.training.seed);
  nn::restore_parameters(data, loaded.model->params().all());
  return loaded;
}

}  // namespace hs::detect
