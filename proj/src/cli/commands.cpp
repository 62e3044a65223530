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

#include "hs/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hs/common/error.hpp"
#include "hs/common/hash.hpp"
#include "hs/corpus/dataset.hpp"
#include "hs/detect/embeddings.hpp"
#include "hs/detect/trainer.hpp"
#include "hs/maskgen/masker.hpp"
#include "hs/metrics/bleu.hpp"
#include "hs/metrics/classification.hpp"
#include "hs/nn/checkpoint.hpp"
#include "hs/text/normalize.hpp"
#include "hs/text/vocab.hpp"

namespace hs::cli {

namespace {

namespace fs = std::filesystem;

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("FileNotFound: cannot write " + path);
  }
  out << content;
}

void write_report(const std::string& path, const nlohmann::json& report) {
  write_text_file(path, report.dump(2) + "\n");
}

std::size_t count_tokens(const std::string& text) {
  return metrics::whitespace_tokens(text).size();
}

std::string resolve_report_dir(const std::string& flag_value,
                               const std::string& config_value) {
  std::string dir = flag_value;
  if (dir.empty()) dir = config_value;
  if (dir.empty()) {
    if (const char* env = std::getenv("HS_REPORT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

std::string synthetic_fingerprint(const SyntheticSpec& spec) {
  const std::string key = "synthetic:" + std::to_string(spec.n) + ":" +
                          std::to_string(spec.lexicon_size) + ":" +
                          std::to_string(spec.vocab_size) + ":" +
                          std::to_string(spec.seed);
  return hex64(fnv1a64(key));
}

struct LabeledData {
  corpus::LabeledBundle bundle;
  std::string corpus_hash;
  std::size_t skipped_lines = 0;
};

LabeledData materialize_labeled(const RunConfig& cfg) {
  LabeledData data;
  if (cfg.data.synthetic.enabled) {
    const SyntheticSpec& spec = cfg.data.synthetic;
    data.bundle = corpus::generate_synthetic_corpus(spec.n, spec.lexicon_size,
                                                    spec.vocab_size, spec.seed)
                      .labeled;
    data.corpus_hash = synthetic_fingerprint(spec);
    return data;
  }
  if (cfg.data.train.empty()) {
    throw ConfigError(
        "ConfigMismatch: data.train is required without data.synthetic");
  }
  auto load_split = [&](const std::string& path,
                        std::vector<corpus::LabeledExample>* out) {
    if (path.empty()) return;
    auto result = corpus::load_labeled_tsv(path);
    data.skipped_lines += result.errors.size();
    auto clean = corpus::preprocess_examples(result.items);
    data.skipped_lines += clean.dropped;
    *out = std::move(clean.examples);
  };
  load_split(cfg.data.train, &data.bundle.train);
  load_split(cfg.data.dev, &data.bundle.dev);
  load_split(cfg.data.test, &data.bundle.test);
  data.bundle.origin = cfg.data.train;
  data.corpus_hash = hash_file(cfg.data.train);
  return data;
}

struct ParallelData {
  corpus::ParallelBundle bundle;
  std::string corpus_hash;
  std::size_t skipped_lines = 0;
};

ParallelData materialize_parallel(const RunConfig& cfg) {
  ParallelData data;
  if (cfg.data.synthetic.enabled) {
    const SyntheticSpec& spec = cfg.data.synthetic;
    data.bundle = corpus::generate_synthetic_corpus(spec.n, spec.lexicon_size,
                                                    spec.vocab_size, spec.seed)
                      .parallel;
    data.corpus_hash = synthetic_fingerprint(spec);
    return data;
  }
  if (cfg.data.train.empty()) {
    throw ConfigError(
        "ConfigMismatch: data.train is required without data.synthetic");
  }
  auto load_split = [&](const std::string& path,
                        std::vector<corpus::ParallelPair>* out) {
    if (path.empty()) return;
    auto result = corpus::load_parallel(path);
    data.skipped_lines += result.errors.size();
    auto clean = corpus::preprocess_pairs(result.items);
    data.skipped_lines += clean.dropped;
    *out = std::move(clean.pairs);
  };
  load_split(cfg.data.train, &data.bundle.train);
  load_split(cfg.data.dev, &data.bundle.dev);
  load_split(cfg.data.test, &data.bundle.test);
  data.bundle.origin = cfg.data.train;
  data.corpus_hash = hash_file(cfg.data.train);
  return data;
}

std::vector<std::string> texts_of(
    const std::vector<corpus::LabeledExample>& examples) {
  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& ex : examples) texts.push_back(ex.text);
  return texts;
}

std::vector<std::string> sides_of(
    const std::vector<corpus::ParallelPair>& pairs, bool target) {
  std::vector<std::string> texts;
  texts.reserve(pairs.size());
  for (const auto& p : pairs) texts.push_back(target ? p.target : p.source);
  return texts;
}

nlohmann::json history_json(const std::vector<detect::EpochStats>& history) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : history) {
    rows.push_back({{"train_loss", e.train_loss},
                    {"dev_loss", e.dev_loss},
                    {"dev_accuracy", e.dev_accuracy}});
  }
  return rows;
}

nlohmann::json history_json(
    const std::vector<maskgen::MaskerEpochStats>& history) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : history) {
    rows.push_back(
        {{"train_loss", e.train_loss}, {"dev_loss", e.dev_loss}});
  }
  return rows;
}

std::string format_cell(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << value;
  return out.str();
}

// Rows of {vocab size, unk, bleu1..4} in the masker result layout.
struct BleuRow {
  std::size_t vocab_size = 0;
  long long unk = 0;
  std::array<double, 4> bleu{{0, 0, 0, 0}};
};

std::string render_bleu_table(const std::vector<BleuRow>& rows) {
  std::ostringstream out;
  out << "Vocab Size |   UNK | BLEU 1 | BLEU 2 | BLEU 3 | BLEU 4\n";
  out << "-----------+-------+--------+--------+--------+-------\n";
  for (const auto& row : rows) {
    out << std::setw(10) << row.vocab_size << " | " << std::setw(5) << row.unk;
    for (double b : row.bleu) out << " | " << format_cell(b);
    out << "\n";
  }
  return out.str();
}

TrainOutcome train_detect(const RunConfig& config, const TrainOptions& options,
                          RunConfig resolved) {
  LabeledData data = materialize_labeled(config);
  if (data.bundle.train.empty()) {
    throw ValueError("EmptySplit: no usable training examples");
  }

  text::Vocabulary vocab =
      text::build_word_vocab(texts_of(data.bundle.train), config.data.vocab_cap);

  detect::ClassifierConfig model_cfg = config.detect_model;
  model_cfg.vocab_size = vocab.token_count();
  detect::ClassifierModel model(model_cfg, model_cfg.training.seed);

  nlohmann::json embedding_info;
  if (!config.data.embeddings.empty()) {
    detect::EmbeddingLoad load = detect::load_pretrained_embeddings(
        config.data.embeddings, vocab, model_cfg.embed_dim,
        model_cfg.training.seed);
    model.params().find("embedding.table")->value() = load.table;
    embedding_info = {{"found", load.found},
                      {"missing", load.missing},
                      {"coverage", load.coverage()}};
  }

  const std::size_t seq_len = model_cfg.seq_len;
  auto train = detect::encode_examples(data.bundle.train, vocab, seq_len);
  auto dev = detect::encode_examples(data.bundle.dev, vocab, seq_len);
  auto test = detect::encode_examples(data.bundle.test, vocab, seq_len);

  detect::TrainResult result =
      detect::train_classifier(model, train, dev, model_cfg.training);

  TrainOutcome outcome;
  const std::string report_dir =
      resolve_report_dir(options.report_dir, config.eval.report_dir);
  outcome.checkpoint_path = !options.checkpoint.empty() ? options.checkpoint
                            : !config.eval.checkpoint.empty()
                                ? config.eval.checkpoint
                                : report_dir + "/detect.ckpt";
  outcome.report_path = report_dir + "/detect_report.json";

  ensure_parent_dir(outcome.checkpoint_path);
  detect::save_classifier(outcome.checkpoint_path, model, vocab);

  resolved.detect_model = model_cfg;
  resolved.eval.report_dir = report_dir;
  resolved.eval.checkpoint = outcome.checkpoint_path;
  outcome.report = {{"task", "detect"},
                    {"config", resolved_json(resolved)},
                    {"corpus_hash", data.corpus_hash},
                    {"skipped_lines", data.skipped_lines},
                    {"vocab_size", vocab.token_count()},
                    {"history", history_json(result.history)},
                    {"stopped_early", result.stopped_early},
                    {"epochs_run", result.epochs_run},
                    {"checkpoint", outcome.checkpoint_path}};
  if (!embedding_info.is_null()) outcome.report["embeddings"] = embedding_info;

  if (test.size() > 0) {
    metrics::EvalReport eval = detect::evaluate_classifier(model, test);
    outcome.report["eval"] = metrics::to_json(eval);
    outcome.tables.push_back(
        metrics::render_eval_table(eval, detect::to_string(model_cfg.arch)));
  }

  write_report(outcome.report_path, outcome.report);
  return outcome;
}

TrainOutcome train_mask(const RunConfig& config, const TrainOptions& options,
                        RunConfig resolved) {
  ParallelData data = materialize_parallel(config);
  if (data.bundle.train.empty()) {
    throw ValueError("EmptySplit: no usable training pairs");
  }
  if (data.bundle.dev.empty()) {
    throw ValueError("EmptySplit: mask training needs a dev split");
  }

  text::Vocabulary src_vocab = text::build_word_vocab(
      sides_of(data.bundle.train, false), config.data.vocab_cap);
  text::Vocabulary tgt_vocab = text::build_word_vocab(
      sides_of(data.bundle.train, true), config.data.vocab_cap);

  maskgen::Seq2SeqConfig model_cfg = config.mask_model;
  model_cfg.source_vocab_size = src_vocab.token_count();
  model_cfg.target_vocab_size = tgt_vocab.token_count();
  maskgen::MaskerModel model(model_cfg, model_cfg.seed);

  auto train = maskgen::prepare_pairs(data.bundle.train, src_vocab, tgt_vocab,
                                      model_cfg.seq_len);
  auto dev = maskgen::prepare_pairs(data.bundle.dev, src_vocab, tgt_vocab,
                                    model_cfg.seq_len);

  maskgen::MaskerTrainResult result = maskgen::train_masker(model, train, dev);

  TrainOutcome outcome;
  const std::string report_dir =
      resolve_report_dir(options.report_dir, config.eval.report_dir);
  outcome.checkpoint_path = !options.checkpoint.empty() ? options.checkpoint
                            : !config.eval.checkpoint.empty()
                                ? config.eval.checkpoint
                                : report_dir + "/mask.ckpt";
  outcome.report_path = report_dir + "/mask_report.json";

  ensure_parent_dir(outcome.checkpoint_path);
  maskgen::save_masker(outcome.checkpoint_path, model, src_vocab, tgt_vocab);

  resolved.mask_model = model_cfg;
  resolved.eval.report_dir = report_dir;
  resolved.eval.checkpoint = outcome.checkpoint_path;
  outcome.report = {{"task", "mask"},
                    {"config", resolved_json(resolved)},
                    {"corpus_hash", data.corpus_hash},
                    {"skipped_lines", data.skipped_lines},
                    {"source_vocab_size", src_vocab.token_count()},
                    {"target_vocab_size", tgt_vocab.token_count()},
                    {"history", history_json(result.history)},
                    {"stopped_early", result.stopped_early},
                    {"epochs_run", result.epochs_run},
                    {"best_epoch", result.best_epoch},
                    {"checkpoint", outcome.checkpoint_path}};

  const auto& eval_pairs =
      !data.bundle.test.empty() ? data.bundle.test : data.bundle.train;
  metrics::BleuReport bleu =
      maskgen::evaluate_masker(model, src_vocab, tgt_vocab, eval_pairs);
  outcome.report["eval"] = metrics::to_json(bleu);
  outcome.report["eval_split"] = !data.bundle.test.empty() ? "test" : "train";
  BleuRow row;
  row.vocab_size = tgt_vocab.token_count();
  row.unk = bleu.unk_count;
  row.bleu = bleu.bleu;
  outcome.tables.push_back(render_bleu_table({row}));

  write_report(outcome.report_path, outcome.report);
  return outcome;
}

std::string checkpoint_kind(const std::string& path) {
  nn::CheckpointData data = nn::load_checkpoint(path);
  try {
    return nlohmann::json::parse(data.manifest_json).value("kind", "");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("FormatError: checkpoint manifest ") +
                    e.what());
  }
}

void check_vocab_match(const text::Vocabulary& from_checkpoint,
                       const std::string& vocab_path) {
  if (vocab_path.empty()) return;
  text::Vocabulary supplied = text::Vocabulary::load(vocab_path);
  if (supplied.token_list() != from_checkpoint.token_list()) {
    throw DataError("VocabMismatch: " + vocab_path +
                    " differs from the checkpoint's vocabulary");
  }
}

}  // namespace

nlohmann::json to_json(const PreprocessSummary& summary) {
  return {{"lines_in", summary.lines_in},
          {"lines_kept", summary.lines_kept},
          {"lines_dropped", summary.lines_dropped},
          {"tokens_in", summary.tokens_in},
          {"tokens_out", summary.tokens_out}};
}

PreprocessSummary cmd_preprocess(const PreprocessOptions& options) {
  PreprocessSummary summary;
  if (options.format == "plain") {
    std::ifstream in(options.input, std::ios::binary);
    if (!in) {
      throw DataError("FileNotFound: " + options.input);
    }
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++summary.lines_in;
      summary.tokens_in += count_tokens(line);
      const std::string clean = text::preprocess(line);
      if (clean.empty()) {
        ++summary.lines_dropped;
        continue;
      }
      ++summary.lines_kept;
      summary.tokens_out += count_tokens(clean);
      out << clean << "\n";
    }
    write_text_file(options.output, out.str());
    return summary;
  }
  if (options.format == "labeled") {
    auto result = corpus::load_labeled_tsv(options.input);
    summary.lines_in = result.items.size() + result.errors.size();
    for (const auto& ex : result.items)
      summary.tokens_in += count_tokens(ex.text);
    auto clean = corpus::preprocess_examples(result.items);
    summary.lines_dropped = result.errors.size() + clean.dropped;
    summary.lines_kept = clean.examples.size();
    for (const auto& ex : clean.examples)
      summary.tokens_out += count_tokens(ex.text);
    ensure_parent_dir(options.output);
    corpus::save_labeled_tsv(clean.examples, options.output);
    return summary;
  }
  if (options.format == "parallel") {
    auto result = corpus::load_parallel(options.input);
    summary.lines_in = result.items.size() + result.errors.size();
    for (const auto& p : result.items)
      summary.tokens_in += count_tokens(p.source);
    auto clean = corpus::preprocess_pairs(result.items);
    summary.lines_dropped = result.errors.size() + clean.dropped;
    summary.lines_kept = clean.pairs.size();
    for (const auto& p : clean.pairs)
      summary.tokens_out += count_tokens(p.source);
    ensure_parent_dir(options.output);
    corpus::save_parallel(clean.pairs, options.output);
    return summary;
  }
  throw ConfigError("ConfigMismatch: unknown preprocess format \"" +
                    options.format + "\"");
}

VocabSummary cmd_vocab(const VocabOptions& options) {
  std::vector<std::string> texts;
  if (options.format == "plain") {
    std::ifstream in(options.input, std::ios::binary);
    if (!in) {
      throw DataError("FileNotFound: " + options.input);
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const bool star_side = options.side == "target";
      text::NormalizationConfig norm;
      norm.preserve_star_runs = star_side;
      const std::string clean = text::preprocess(line, norm);
      if (!clean.empty()) texts.push_back(clean);
    }
  } else if (options.format == "labeled") {
    auto result = corpus::load_labeled_tsv(options.input);
    auto clean = corpus::preprocess_examples(result.items);
    texts = texts_of(clean.examples);
  } else if (options.format == "parallel") {
    if (options.side != "source" && options.side != "target") {
      throw ConfigError("ConfigMismatch: unknown vocab side \"" +
                        options.side + "\"");
    }
    auto result = corpus::load_parallel(options.input);
    auto clean = corpus::preprocess_pairs(result.items);
    texts = sides_of(clean.pairs, options.side == "target");
  } else {
    throw ConfigError("ConfigMismatch: unknown vocab format \"" +
                      options.format + "\"");
  }

  text::Vocabulary vocab = text::build_word_vocab(
      texts, options.size,
      options.basic_specials ? text::Vocabulary::Specials::kBasic
                             : text::Vocabulary::Specials::kFull);
  ensure_parent_dir(options.output);
  vocab.save(options.output);

  VocabSummary summary;
  summary.tokens = vocab.token_count();
  summary.corpus_hash = hash_file(options.input);
  return summary;
}

TrainOutcome cmd_train(const TrainOptions& options) {
  RunConfig config = load_run_config(options.config_path);
  if (options.has_seed) {
    config.detect_model.training.seed = options.seed;
    config.mask_model.seed = options.seed;
  }
  if (config.task == Task::kDetect) {
    return train_detect(config, options, config);
  }
  return train_mask(config, options, config);
}

EvalOutcome cmd_eval(const EvalOptions& options) {
  const std::string kind = checkpoint_kind(options.checkpoint);
  EvalOutcome outcome;
  if (kind == "classifier") {
    detect::LoadedClassifier loaded =
        detect::load_classifier(options.checkpoint);
    check_vocab_match(loaded.vocab, options.vocab_path);
    auto result = corpus::load_labeled_tsv(options.test_path);
    auto clean = corpus::preprocess_examples(result.items);
    auto test = detect::encode_examples(clean.examples, loaded.vocab,
                                        loaded.model->config().seq_len);
    metrics::EvalReport eval = detect::evaluate_classifier(*loaded.model, test);
    outcome.table = metrics::render_eval_table(
        eval, detect::to_string(loaded.model->config().arch));
    outcome.report = {{"task", "detect"},
                      {"checkpoint", options.checkpoint},
                      {"test", options.test_path},
                      {"test_hash", hash_file(options.test_path)},
                      {"skipped_lines", result.errors.size() + clean.dropped},
                      {"eval", metrics::to_json(eval)}};
  } else if (kind == "masker") {
    maskgen::LoadedMasker loaded = maskgen::load_masker(options.checkpoint);
    check_vocab_match(loaded.source_vocab, options.vocab_path);
    auto result = corpus::load_parallel(options.test_path);
    auto clean = corpus::preprocess_pairs(result.items);
    if (clean.pairs.empty()) {
      throw ValueError("EmptySplit: no usable pairs in " + options.test_path);
    }
    metrics::BleuReport bleu =
        maskgen::evaluate_masker(*loaded.model, loaded.source_vocab,
                                 loaded.target_vocab, clean.pairs);
    BleuRow row;
    row.vocab_size = loaded.target_vocab.token_count();
    row.unk = bleu.unk_count;
    row.bleu = bleu.bleu;
    outcome.table = render_bleu_table({row});
    outcome.report = {{"task", "mask"},
                      {"checkpoint", options.checkpoint},
                      {"test", options.test_path},
                      {"test_hash", hash_file(options.test_path)},
                      {"skipped_lines", result.errors.size() + clean.dropped},
                      {"vocab_size", loaded.target_vocab.token_count()},
                      {"eval", metrics::to_json(bleu)}};
  } else {
    throw DataError("FormatError: checkpoint kind \"" + kind +
                    "\" is not evaluable");
  }
  if (!options.report_path.empty()) {
    write_report(options.report_path, outcome.report);
  }
  return outcome;
}

MaskOutcome cmd_mask(const MaskOptions& options) {
  MaskOutcome outcome;
  if (options.oracle) {
    if (options.lexicon.empty()) {
      throw ConfigError("ConfigMismatch: --oracle needs --lexicon");
    }
    corpus::Lexicon lexicon = corpus::Lexicon::load(options.lexicon);
    const std::string clean = text::preprocess(options.text);
    outcome.output = corpus::mask_with_lexicon(clean, lexicon);
    outcome.lint_ok = true;
    return outcome;
  }
  if (options.checkpoint.empty()) {
    throw ConfigError("ConfigMismatch: neural masking needs --checkpoint");
  }
  maskgen::LoadedMasker loaded = maskgen::load_masker(options.checkpoint);
  maskgen::DecodeResult decoded = maskgen::greedy_decode(
      *loaded.model, loaded.source_vocab, loaded.target_vocab, options.text,
      loaded.model->config().seq_len);
  outcome.output = decoded.text;
  outcome.unk_count = decoded.unk_count;
  outcome.lint_ok = passes_star_lint(decoded.text);
  return outcome;
}

const std::vector<std::size_t>& default_sweep_sizes() {
  static const std::vector<std::size_t> kSizes{6000, 8000, 10000, 12000,
                                               15000};
  return kSizes;
}

SweepOutcome cmd_sweep(const SweepOptions& options) {
  RunConfig config = load_run_config(options.config_path);
  if (config.task != Task::kMask) {
    throw ConfigError("ConfigMismatch: sweep only applies to the mask task");
  }
  std::vector<std::size_t> sizes =
      options.sizes.empty() ? default_sweep_sizes() : options.sizes;
  std::sort(sizes.rbegin(), sizes.rend());

  ParallelData data = materialize_parallel(config);
  if (data.bundle.train.empty()) {
    throw ValueError("EmptySplit: no usable training pairs");
  }
  if (data.bundle.dev.empty()) {
    throw ValueError("EmptySplit: sweep training needs a dev split");
  }
  const auto& eval_pairs =
      !data.bundle.test.empty() ? data.bundle.test : data.bundle.dev;

  std::vector<BleuRow> rows;
  nlohmann::json row_json = nlohmann::json::array();
  for (std::size_t size : sizes) {
    text::Vocabulary src_vocab =
        text::build_word_vocab(sides_of(data.bundle.train, false), size);
    text::Vocabulary tgt_vocab =
        text::build_word_vocab(sides_of(data.bundle.train, true), size);

    maskgen::Seq2SeqConfig model_cfg = config.mask_model;
    model_cfg.source_vocab_size = src_vocab.token_count();
    model_cfg.target_vocab_size = tgt_vocab.token_count();
    maskgen::MaskerModel model(model_cfg, model_cfg.seed);

    auto train = maskgen::prepare_pairs(data.bundle.train, src_vocab,
                                        tgt_vocab, model_cfg.seq_len);
    auto dev = maskgen::prepare_pairs(data.bundle.dev, src_vocab, tgt_vocab,
                                      model_cfg.seq_len);
    maskgen::train_masker(model, train, dev);

    metrics::BleuReport bleu =
        maskgen::evaluate_masker(model, src_vocab, tgt_vocab, eval_pairs);
    BleuRow row;
    row.vocab_size = size;
    row.unk = bleu.unk_count;
    row.bleu = bleu.bleu;
    rows.push_back(row);

    nlohmann::json entry = {{"vocab_size", size},
                            {"source_tokens", src_vocab.token_count()},
                            {"target_tokens", tgt_vocab.token_count()},
                            {"unk", bleu.unk_count},
                            {"bleu1", bleu.bleu[0]},
                            {"bleu2", bleu.bleu[1]},
                            {"bleu3", bleu.bleu[2]},
                            {"bleu4", bleu.bleu[3]}};
    row_json.push_back(entry);
  }

  SweepOutcome outcome;
  const std::string report_dir =
      resolve_report_dir(options.report_dir, config.eval.report_dir);
  outcome.report_path = report_dir + "/sweep_report.json";
  outcome.table = render_bleu_table(rows);
  outcome.report = {{"task", "mask"},
                    {"config", resolved_json(config)},
                    {"corpus_hash", data.corpus_hash},
                    {"sizes", sizes},
                    {"rows", row_json}};
  write_report(outcome.report_path, outcome.report);
  return outcome;
}

bool passes_star_lint(const std::string& text) {
  for (const std::string& token : metrics::whitespace_tokens(text)) {
    const std::size_t stars =
        static_cast<std::size_t>(std::count(token.begin(), token.end(), '*'));
    if (stars != 0 && stars != token.size()) return false;
  }
  return true;
}

}  // namespace hs::cli
