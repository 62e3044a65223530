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

#include <string>
#include <vector>

#include <json.hpp>

#include "hs/common/label.hpp"

namespace hs::metrics {

// Positive class is Offensive throughout.
struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long tn = 0;

  long long total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-class precision/recall/F1, their unweighted macro average, and
// accuracy. Zero-denominator metrics are defined as 0.
struct EvalReport {
  ClassMetrics offensive;
  ClassMetrics not_offensive;
  ClassMetrics macro;
  double accuracy = 0.0;
  ConfusionCounts counts;
};

// Throws ValueError("LengthMismatch...") on unequal lengths and
// ValueError("Empty...") on empty inputs.
ConfusionCounts confusion(const std::vector<Label>& preds,
                          const std::vector<Label>& golds);

// Requires counts.total() > 0.
EvalReport prf1(const ConfusionCounts& counts);

nlohmann::json to_json(const EvalReport& report);

// Renders the classification report in the P/R/F1 per class + macro + A
// column layout used by the eval command.
std::string render_eval_table(const EvalReport& report,
                              const std::string& model_name);

}  // namespace hs::metrics
