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
#include <vector>

#include "hs/corpus/dataset.hpp"
#include "hs/maskgen/seq2seq.hpp"
#include "hs/metrics/bleu.hpp"
#include "hs/text/vocab.hpp"

namespace hs::maskgen {

struct MaskerEpochStats {
  double train_loss = 0.0;
  double dev_loss = 0.0;
};

struct MaskerTrainResult {
  std::vector<MaskerEpochStats> history;
  bool stopped_early = false;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // index into history of the dev-loss minimum
};

// Adam on masked cross-entropy plus the L2 penalty from cfg.l2_lambda.
// Stops after cfg.patience epochs without a dev-loss improvement (or at
// cfg.max_epochs) and restores the weights of the best dev epoch.
// Deterministic for a fixed config. Throws ValueError EmptySplit when
// either split is empty.
MaskerTrainResult train_masker(MaskerModel& model, const PreparedPairs& train,
                               const PreparedPairs& dev);

struct DecodeResult {
  std::string text;            // detokenized, specials removed
  std::vector<int> token_ids;  // generated ids, [end] excluded
  std::size_t unk_count = 0;
};

// Feeds [start] plus the generated prefix back through the decoder and
// appends the argmax token each step (ties break to the lowest id), until
// [end] or max_len tokens. Deterministic.
DecodeResult greedy_decode(const MaskerModel& model,
                           const text::Vocabulary& source_vocab,
                           const text::Vocabulary& target_vocab,
                           const std::string& source_text,
                           std::size_t max_len);

// Greedy-decodes every source and scores the outputs against the targets
// with corpus-level cumulative BLEU; unk_count sums over all decodes.
// Throws ValueError EmptySplit on no pairs.
metrics::BleuReport evaluate_masker(
    const MaskerModel& model, const text::Vocabulary& source_vocab,
    const text::Vocabulary& target_vocab,
    const std::vector<corpus::ParallelPair>& pairs);

// Checkpoint bundles the config and both vocabularies; loading rebuilds a
// model that decodes identically.
void save_masker(const std::string& path, const MaskerModel& model,
                 const text::Vocabulary& source_vocab,
                 const text::Vocabulary& target_vocab);

struct LoadedMasker {
  std::unique_ptr<MaskerModel> model;
  text::Vocabulary source_vocab;
  text::Vocabulary target_vocab;
};

LoadedMasker load_masker(const std::string& path);

}  // namespace hs::maskgen
