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

#include <json.hpp>

#include "hs/detect/model.hpp"
#include "hs/maskgen/seq2seq.hpp"

namespace hs::cli {

enum class Task { kDetect, kMask };

std::string to_string(Task task);

// Generator settings for runs that train on built-in synthetic data
// instead of corpus files.
struct SyntheticSpec {
  bool enabled = false;
  std::size_t n = 200;
  std::size_t lexicon_size = 8;
  std::size_t vocab_size = 40;
  std::uint64_t seed = 5;
};

struct DataSection {
  std::string train;
  std::string dev;
  std::string test;
  std::string lexicon;
  std::string embeddings;       // word2vec text file, detect only
  std::size_t vocab_cap = 10000;  // word vocabulary size limit
  SyntheticSpec synthetic;
};

struct EvalSection {
  std::string report_dir;   // empty: HS_REPORT_DIR, then "."
  std::string checkpoint;   // empty: <report_dir>/<task>.ckpt
};

// One experiment file: {task, data, model, training, eval}. The model and
// training sections fill the task's config; vocabulary sizes are derived
// from the data at run time and may not be set by hand.
struct RunConfig {
  Task task = Task::kDetect;
  DataSection data;
  detect::ClassifierConfig detect_model;
  maskgen::Seq2SeqConfig mask_model;
  EvalSection eval;
};

// Strict parse: unknown keys anywhere are rejected, and every problem in
// the file is collected into one ConfigError so a bad config reports all
// of its mistakes at once.
RunConfig run_config_from_json(const nlohmann::json& j);

// Reads and parses `path`. DataError on a missing or unreadable file,
// ConfigError on malformed JSON or invalid content.
RunConfig load_run_config(const std::string& path);

// The fully resolved config for embedding into reports: model sections
// carry their derived vocabulary sizes once those exist.
nlohmann::json resolved_json(const RunConfig& cfg);

}  // namespace hs::cli
