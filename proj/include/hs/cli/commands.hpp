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

#include "hs/cli/run_config.hpp"

namespace hs::cli {

// Each command is a plain function over an options struct so the binary
// and the tests share one implementation. Commands throw hs errors; the
// binary maps them to exit codes.

struct PreprocessOptions {
  std::string input;
  std::string output;
  std::string format = "plain";  // plain | labeled | parallel
};

struct PreprocessSummary {
  std::size_t lines_in = 0;
  std::size_t lines_kept = 0;
  std::size_t lines_dropped = 0;  // malformed, or empty after cleaning
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
};

nlohmann::json to_json(const PreprocessSummary& summary);

PreprocessSummary cmd_preprocess(const PreprocessOptions& options);

struct VocabOptions {
  std::string input;
  std::string output;
  std::string format = "plain";
  std::string side = "source";  // parallel input: source | target
  std::size_t size = 10000;
  bool basic_specials = false;  // drop [start]/[end] from the layout
};

struct VocabSummary {
  std::size_t tokens = 0;
  std::string corpus_hash;
};

VocabSummary cmd_vocab(const VocabOptions& options);

struct TrainOptions {
  std::string config_path;
  std::string report_dir;  // overrides the config and HS_REPORT_DIR
  std::string checkpoint;  // overrides the config
  bool has_seed = false;
  std::uint64_t seed = 0;  // overrides every config seed when has_seed
};

struct TrainOutcome {
  std::string report_path;
  std::string checkpoint_path;
  nlohmann::json report;
  std::vector<std::string> tables;  // rendered for stdout
};

TrainOutcome cmd_train(const TrainOptions& options);

struct EvalOptions {
  std::string checkpoint;
  std::string test_path;
  std::string vocab_path;   // optional: must match the checkpoint's vocab
  std::string report_path;  // optional JSON output
};

struct EvalOutcome {
  nlohmann::json report;
  std::string table;
};

EvalOutcome cmd_eval(const EvalOptions& options);

struct MaskOptions {
  std::string checkpoint;  // neural mode
  std::string text;
  bool oracle = false;
  std::string lexicon;  // oracle mode
};

struct MaskOutcome {
  std::string output;
  bool lint_ok = true;  // neural output may violate the star-run format
  std::size_t unk_count = 0;
};

MaskOutcome cmd_mask(const MaskOptions& options);

struct SweepOptions {
  std::string config_path;
  std::vector<std::size_t> sizes;  // empty: default_sweep_sizes()
  std::string report_dir;
};

struct SweepOutcome {
  std::string report_path;
  nlohmann::json report;
  std::string table;
};

SweepOutcome cmd_sweep(const SweepOptions& options);

const std::vector<std::size_t>& default_sweep_sizes();

// True when every whitespace token is either a pure '*' run or star-free.
bool passes_star_lint(const std::string& text);

}  // namespace hs::cli
