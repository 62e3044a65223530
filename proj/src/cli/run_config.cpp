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

#include "hs/cli/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <vector>

#include "hs/common/error.hpp"

namespace hs::cli {

namespace {

// Accumulates every problem found in a config file so the user gets one
// message naming all of them instead of a fix-rerun loop.
struct Problems {
  std::vector<std::string> items;

  void add(const std::string& what) { items.push_back(what); }

  void check_keys(const nlohmann::json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (ok.count(it.key()) == 0) {
        add(where + ": unknown key \"" + it.key() + "\"");
      }
    }
  }

  void throw_if_any() const {
    if (items.empty()) return;
    std::ostringstream msg;
    msg << "ConfigMismatch: " << items.size() << " config problem"
        << (items.size() == 1 ? "" : "s") << ":";
    for (const std::string& item : items) msg << "\n  - " << item;
    throw ConfigError(msg.str());
  }
};

std::string json_type_name(const nlohmann::json& v) { return v.type_name(); }

void read_string(const nlohmann::json& obj, const std::string& where,
                 const char* key, std::string* out, Problems* problems) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_string()) {
    problems->add(where + "." + key + ": expected a string, got " +
                  json_type_name(v));
    return;
  }
  *out = v.get<std::string>();
}

void read_size(const nlohmann::json& obj, const std::string& where,
               const char* key, std::size_t* out, Problems* problems,
               std::size_t min_value = 0) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() &&
                                 v.get<long long>() < 0)) {
    problems->add(where + "." + key + ": expected a non-negative integer");
    return;
  }
  const auto value = static_cast<std::size_t>(v.get<long long>());
  if (value < min_value) {
    problems->add(where + "." + key + ": must be at least " +
                  std::to_string(min_value));
    return;
  }
  *out = value;
}

void read_seed(const nlohmann::json& obj, const std::string& where,
               const char* key, std::uint64_t* out, Problems* problems) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    problems->add(where + "." + key + ": expected a non-negative integer");
    return;
  }
  *out = v.get<std::uint64_t>();
}

void read_double(const nlohmann::json& obj, const std::string& where,
                 const char* key, double* out, Problems* problems,
                 double lo, double hi) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    problems->add(where + "." + key + ": expected a number");
    return;
  }
  const double value = v.get<double>();
  if (value < lo || value > hi) {
    problems->add(where + "." + key + ": must be in [" +
                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return;
  }
  *out = value;
}

void read_bool(const nlohmann::json& obj, const std::string& where,
               const char* key, bool* out, Problems* problems) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) {
    problems->add(where + "." + key + ": expected true or false");
    return;
  }
  *out = v.get<bool>();
}

void parse_data(const nlohmann::json& j, DataSection* data,
                Problems* problems) {
  if (!j.is_object()) {
    problems->add("data: expected an object");
    return;
  }
  problems->check_keys(j, "data",
                       {"train", "dev", "test", "lexicon", "embeddings",
                        "vocab_size", "synthetic"});
  read_string(j, "data", "train", &data->train, problems);
  read_string(j, "data", "dev", &data->dev, problems);
  read_string(j, "data", "test", &data->test, problems);
  read_string(j, "data", "lexicon", &data->lexicon, problems);
  read_string(j, "data", "embeddings", &data->embeddings, problems);
  read_size(j, "data", "vocab_size", &data->vocab_cap, problems, 3);
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (!s.is_object()) {
      problems->add("data.synthetic: expected an object");
      return;
    }
    data->synthetic.enabled = true;
    problems->check_keys(s, "data.synthetic",
                         {"n", "lexicon_size", "vocab_size", "seed"});
    read_size(s, "data.synthetic", "n", &data->synthetic.n, problems, 10);
    read_size(s, "data.synthetic", "lexicon_size",
              &data->synthetic.lexicon_size, problems, 1);
    read_size(s, "data.synthetic", "vocab_size", &data->synthetic.vocab_size,
              problems, 4);
    read_seed(s, "data.synthetic", "seed", &data->synthetic.seed, problems);
  }
}

void parse_detect_model(const nlohmann::json& j,
                        detect::ClassifierConfig* cfg, Problems* problems) {
  problems->check_keys(j, "model",
                       {"arch", "seq_len", "embed_dim", "lstm_units1",
                        "lstm_units2", "rnn_dropout", "conv_filters",
                        "conv_kernel", "dense_units", "cnn_dropout", "pool",
                        "cnn_rnn_lstm_units", "cnn_rnn_dropout"});
  if (j.contains("arch")) {
    if (!j.at("arch").is_string()) {
      problems->add("model.arch: expected a string");
    } else {
      try {
        cfg->arch = detect::arch_from_string(j.at("arch").get<std::string>());
      } catch (const ConfigError& e) {
        problems->add(std::string("model.arch: ") + e.what());
      }
    }
  }
  read_size(j, "model", "seq_len", &cfg->seq_len, problems, 1);
  read_size(j, "model", "embed_dim", &cfg->embed_dim, problems, 1);
  read_size(j, "model", "lstm_units1", &cfg->lstm_units1, problems, 1);
  read_size(j, "model", "lstm_units2", &cfg->lstm_units2, problems, 1);
  read_size(j, "model", "conv_filters", &cfg->conv_filters, problems, 1);
  read_size(j, "model", "conv_kernel", &cfg->conv_kernel, problems, 1);
  read_size(j, "model", "dense_units", &cfg->dense_units, problems, 1);
  read_size(j, "model", "pool", &cfg->pool, problems, 1);
  read_size(j, "model", "cnn_rnn_lstm_units", &cfg->cnn_rnn_lstm_units,
            problems, 1);
  read_double(j, "model", "rnn_dropout", &cfg->rnn_dropout, problems, 0.0,
              0.999);
  read_double(j, "model", "cnn_dropout", &cfg->cnn_dropout, problems, 0.0,
              0.999);
  read_double(j, "model", "cnn_rnn_dropout", &cfg->cnn_rnn_dropout, problems,
              0.0, 0.999);
}

void parse_mask_model(const nlohmann::json& j, maskgen::Seq2SeqConfig* cfg,
                      Problems* problems) {
  problems->check_keys(j, "model",
                       {"seq_len", "embed_dim", "heads", "ff_dim",
                        "encoder_layers", "decoder_layers", "dropout"});
  read_size(j, "model", "seq_len", &cfg->seq_len, problems, 1);
  read_size(j, "model", "embed_dim", &cfg->embed_dim, problems, 1);
  read_size(j, "model", "heads", &cfg->heads, problems, 1);
  read_size(j, "model", "ff_dim", &cfg->ff_dim, problems, 1);
  read_size(j, "model", "encoder_layers", &cfg->encoder_layers, problems, 1);
  read_size(j, "model", "decoder_layers", &cfg->decoder_layers, problems, 1);
  read_double(j, "model", "dropout", &cfg->dropout, problems, 0.0, 0.999);
  if (cfg->heads > 0 && cfg->embed_dim % cfg->heads != 0) {
    problems->add("model: embed_dim " + std::to_string(cfg->embed_dim) +
                  " is not divisible by heads " + std::to_string(cfg->heads));
  }
}

void parse_detect_training(const nlohmann::json& j,
                           detect::TrainingPolicy* policy,
                           Problems* problems) {
  problems->check_keys(j, "training",
                       {"lr", "batch_size", "max_epochs", "early_stopping",
                        "patience", "l2_lambda", "seed"});
  read_double(j, "training", "lr", &policy->lr, problems, 1e-12, 10.0);
  read_size(j, "training", "batch_size", &policy->batch_size, problems, 1);
  read_size(j, "training", "max_epochs", &policy->max_epochs, problems, 1);
  read_bool(j, "training", "early_stopping", &policy->early_stopping,
            problems);
  read_size(j, "training", "patience", &policy->patience, problems, 1);
  read_double(j, "training", "l2_lambda", &policy->l2_lambda, problems, 0.0,
              1e6);
  read_seed(j, "training", "seed", &policy->seed, problems);
}

void parse_mask_training(const nlohmann::json& j, maskgen::Seq2SeqConfig* cfg,
                         Problems* problems) {
  // The masker always early-stops with best-weight restore, so there is no
  // early_stopping switch here.
  problems->check_keys(j, "training",
                       {"lr", "batch_size", "max_epochs", "patience",
                        "l2_lambda", "seed"});
  read_double(j, "training", "lr", &cfg->lr, problems, 1e-12, 10.0);
  read_size(j, "training", "batch_size", &cfg->batch_size, problems, 1);
  read_size(j, "training", "max_epochs", &cfg->max_epochs, problems, 1);
  read_size(j, "training", "patience", &cfg->patience, problems, 1);
  read_double(j, "training", "l2_lambda", &cfg->l2_lambda, problems, 0.0,
              1e6);
  read_seed(j, "training", "seed", &cfg->seed, problems);
}

void parse_eval(const nlohmann::json& j, EvalSection* eval,
                Problems* problems) {
  if (!j.is_object()) {
    problems->add("eval: expected an object");
    return;
  }
  problems->check_keys(j, "eval", {"report_dir", "checkpoint"});
  read_string(j, "eval", "report_dir", &eval->report_dir, problems);
  read_string(j, "eval", "checkpoint", &eval->checkpoint, problems);
}

}  // namespace

std::string to_string(Task task) {
  return task == Task::kDetect ? "detect" : "mask";
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  Problems problems;
  RunConfig cfg;
  if (!j.is_object()) {
    throw ConfigError("ConfigMismatch: run config must be a JSON object");
  }
  problems.check_keys(j, "config",
                      {"task", "data", "model", "training", "eval", "seed"});

  bool task_known = false;
  if (!j.contains("task")) {
    problems.add("task: required, one of \"detect\" or \"mask\"");
  } else if (!j.at("task").is_string()) {
    problems.add("task: expected a string");
  } else {
    const std::string name = j.at("task").get<std::string>();
    if (name == "detect") {
      cfg.task = Task::kDetect;
      task_known = true;
    } else if (name == "mask") {
      cfg.task = Task::kMask;
      task_known = true;
    } else {
      problems.add("task: unknown task \"" + name + "\"");
    }
  }

  if (j.contains("data")) parse_data(j.at("data"), &cfg.data, &problems);

  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (!m.is_object()) {
      problems.add("model: expected an object");
    } else if (task_known) {
      if (cfg.task == Task::kDetect) {
        parse_detect_model(m, &cfg.detect_model, &problems);
      } else {
        parse_mask_model(m, &cfg.mask_model, &problems);
      }
    }
  }

  if (j.contains("training")) {
    const auto& t = j.at("training");
    if (!t.is_object()) {
      problems.add("training: expected an object");
    } else if (task_known) {
      if (cfg.task == Task::kDetect) {
        parse_detect_training(t, &cfg.detect_model.training, &problems);
      } else {
        parse_mask_training(t, &cfg.mask_model, &problems);
      }
    }
  }

  if (j.contains("eval")) parse_eval(j.at("eval"), &cfg.eval, &problems);

  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    read_seed(j, "config", "seed", &seed, &problems);
    if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0) {
      cfg.detect_model.training.seed = seed;
      cfg.mask_model.seed = seed;
    }
  }

  problems.throw_if_any();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("FileNotFound: config file " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("ConfigMismatch: " + path + " is not valid JSON: " +
                      e.what());
  }
  return run_config_from_json(j);
}

nlohmann::json resolved_json(const RunConfig& cfg) {
  nlohmann::json data{
      {"train", cfg.data.train},       {"dev", cfg.data.dev},
      {"test", cfg.data.test},         {"lexicon", cfg.data.lexicon},
      {"embeddings", cfg.data.embeddings},
      {"vocab_size", cfg.data.vocab_cap},
  };
  if (cfg.data.synthetic.enabled) {
    data["synthetic"] = {{"n", cfg.data.synthetic.n},
                         {"lexicon_size", cfg.data.synthetic.lexicon_size},
                         {"vocab_size", cfg.data.synthetic.vocab_size},
                         {"seed", cfg.data.synthetic.seed}};
  }
  nlohmann::json model = cfg.task == Task::kDetect
                             ? detect::to_json(cfg.detect_model)
                             : maskgen::to_json(cfg.mask_model);
  return nlohmann::json{{"task", to_string(cfg.task)},
                        {"data", data},
                        {"model", model},
                        {"eval",
                         {{"report_dir", cfg.eval.report_dir},
                          {"checkpoint", cfg.eval.checkpoint}}}};
}

}  // namespace hs::cli
