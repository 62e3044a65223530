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
#include <string>
#include <utility>
#include <vector>

#include "hs/common/label.hpp"
#include "hs/corpus/dataset.hpp"
#include "hs/detect/model.hpp"
#include "hs/metrics/classification.hpp"
#include "hs/text/vocab.hpp"

namespace hs::detect {

// Texts mapped to fixed-length id rows with 0/1 training targets
// (1 = Offensive).
struct EncodedDataset {
  std::vector<std::vector<int>> ids;
  std::vector<double> targets;
  std::vector<Label> labels;

  std::size_t size() const { return ids.size(); }
};

EncodedDataset encode_examples(
    const std::vector<corpus::LabeledExample>& examples,
    const text::Vocabulary& vocab, std::size_t seq_len);

struct EpochStats {
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  bool stopped_early = false;
  std::size_t epochs_run = 0;
};

// Mini-batch Adam on mean binary cross-entropy. Per epoch: shuffle, train,
// then score the dev split in inference mode. With early stopping enabled a
// dev-loss plateau of `patience` epochs ends the run (weights stay at their
// last state; there is no rollback). Deterministic for a fixed policy.
// Throws ValueError EmptySplit for an empty train split, or an empty dev
// split when early stopping asks for one.
TrainResult train_classifier(ClassifierModel& model,
                             const EncodedDataset& train,
                             const EncodedDataset& dev,
                             const TrainingPolicy& policy);

// Label rule: Offensive iff probability > 0.5, strictly.
Label label_from_probability(double probability);

// Preprocesses and encodes one raw text, then runs inference.
std::pair<double, Label> predict(const ClassifierModel& model,
                                 const text::Vocabulary& vocab,
                                 const std::string& raw_text);

// Batched inference over an encoded split, scored with the metrics module.
// Throws ValueError EmptySplit on empty input.
metrics::EvalReport evaluate_classifier(const ClassifierModel& model,
                                        const EncodedDataset& test);

// Checkpoint carries the config, the vocabulary and every parameter;
// loading rebuilds a model that predicts bit-identically.
void save_classifier(const std::string& path, const ClassifierModel& model,
                     const text::Vocabulary& vocab);

struct LoadedClassifier {
  std::unique_ptr<ClassifierModel> model;
  text::Vocabulary vocab;
};

LoadedClassifier load_classifier(const std::string& path);

}  // namespace hs::detect
