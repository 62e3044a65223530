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

#include "hs/metrics/classification.hpp"

#include <iomanip>
#include <sstream>

namespace hs::metrics {

ConfusionCounts confusion(const std::vector<Label>& preds,
                          const std::vector<Label>& golds) {
  if (preds.size() != golds.size()) {
    throw ValueError("LengthMismatch: " + std::to_string(preds.size()) +
                     " predictions vs " + std::to_string(golds.size()) +
                     " gold labels");
  }
  if (preds.empty()) throw ValueError("Empty: no examples to score");
  ConfusionCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == Label::kOffensive;
    const bool g = golds[i] == Label::kOffensive;
    if (p && g)
      ++c.tp;
    else if (p && !g)
      ++c.fp;
    else if (!p && g)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

namespace {

double safe_div(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(long long tp, long long fp, long long fn) {
  ClassMetrics m;
  m.precision = safe_div(tp, tp + fp);
  m.recall = safe_div(tp, tp + fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace

EvalReport prf1(const ConfusionCounts& counts) {
  if (counts.total() <= 0) throw ValueError("Empty: confusion counts are zero");
  EvalReport r;
  r.counts = counts;
  r.offensive = class_metrics(counts.tp, counts.fp, counts.fn);
  // Metrics for the negative class come from swapping the positive class.
  r.not_offensive = class_metrics(counts.tn, counts.fn, counts.fp);
  r.macro.precision = 0.5 * (r.offensive.precision + r.not_offensive.precision);
  r.macro.recall = 0.5 * (r.offensive.recall + r.not_offensive.recall);
  r.macro.f1 = 0.5 * (r.offensive.f1 + r.not_offensive.f1);
  r.accuracy = safe_div(counts.tp + counts.tn, counts.total());
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  auto cls = [](const ClassMetrics& m) {
    return nlohmann::json{
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  return nlohmann::json{
      {"offensive", cls(r.offensive)},
      {"not_offensive", cls(r.not_offensive)},
      {"macro", cls(r.macro)},
      {"accuracy", r.accuracy},
      {"confusion",
       {{"tp", r.counts.tp},
        {"fp", r.counts.fp},
        {"fn", r.counts.fn},
        {"tn", r.counts.tn}}},
  };
}

std::string render_eval_table(const EvalReport& r,
                              const std::string& model_name) {
  std::ostringstream out;
  auto cell = [&](double v) {
    out << std::setw(6) << std::fixed << std::setprecision(2) << v;
  };
  out << std::left << std::setw(24) << "Model"
      << "|   Offensive       |  Not offensive    |    Macro Avg      |   A\n";
  out << std::setw(24) << ""
      << "|     P     R    F1 |     P     R    F1 |     P     R    F1 |\n";
  out << std::setw(24) << model_name << "|";
  out << std::right;
  cell(r.offensive.precision);
  cell(r.offensive.recall);
  cell(r.offensive.f1);
  out << " |";
  cell(r.not_offensive.precision);
  cell(r.not_offensive.recall);
  cell(r.not_offensive.f1);
  out << " |";
  cell(r.macro.precision);
  cell(r.macro.recall);
  cell(r.macro.f1);
  out << " |";
  cell(r.accuracy);
  out << "\n";
  return out.str();
}

}  // namespace hs::metrics
