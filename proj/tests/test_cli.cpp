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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hs/cli/commands.hpp"
#include "hs/cli/run_config.hpp"
#include "hs/common/error.hpp"
#include "hs/common/hash.hpp"
#include "hs/corpus/dataset.hpp"
#include "hs/text/vocab.hpp"

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "hstoolkit_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string config_error_message(const json& j) {
  try {
    hs::cli::run_config_from_json(j);
  } catch (const hs::ConfigError& e) {
    return e.what();
  }
  FAIL("expected ConfigError");
  return "";
}

std::size_t count_occurrences(const std::string& haystack,
                              const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

// Runs the installed binary through the shell and captures exit code plus
// combined output.
struct ToolResult {
  int exit_code = -1;
  std::string output;
};

ToolResult run_tool(const std::string& args) {
  ToolResult result;
  const std::string cmd = std::string(HSTOOL_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) {
    result.output.append(buf, n);
    if (n < sizeof(buf)) break;
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

json tiny_detect_config(const fs::path& dir) {
  json j = {
      {"task", "detect"},
      {"data",
       {{"synthetic", {{"n", 60}, {"lexicon_size", 4}, {"vocab_size", 24},
                       {"seed", 5}}},
        {"vocab_size", 100}}},
      {"model",
       {{"arch", "cnn"}, {"seq_len", 10}, {"embed_dim", 12},
        {"conv_filters", 8}, {"conv_kernel", 2}, {"dense_units", 8},
        {"pool", 2}, {"cnn_dropout", 0.0}}},
      {"training",
       {{"lr", 0.05}, {"batch_size", 16}, {"max_epochs", 3},
        {"early_stopping", false}, {"seed", 11}}},
      {"eval", json::object()}};
  const fs::path path = dir / "detect.json";
  write_file(path, j.dump(2));
  return json{{"path", path.string()}, {"config", j}};
}

json tiny_mask_config(const fs::path& dir) {
  json j = {
      {"task", "mask"},
      {"data",
       {{"synthetic", {{"n", 30}, {"lexicon_size", 3}, {"vocab_size", 16},
                       {"seed", 23}}},
        {"vocab_size", 100}}},
      {"model",
       {{"seq_len", 12}, {"embed_dim", 16}, {"heads", 2}, {"ff_dim", 32},
        {"encoder_layers", 1}, {"decoder_layers", 1}, {"dropout", 0.0}}},
      {"training",
       {{"lr", 0.003}, {"batch_size", 8}, {"max_epochs", 3}, {"patience", 4},
        {"seed", 3}}},
      {"eval", json::object()}};
  const fs::path path = dir / "mask.json";
  write_file(path, j.dump(2));
  return json{{"path", path.string()}, {"config", j}};
}

}  // namespace

TEST_CASE("run config collects every problem into one error") {
  json j = {
      {"task", "detect"},
      {"surprise", 1},
      {"data", {{"vocab_size", 2}}},
      {"model", {{"arch", "transformer"}}},
      {"training", {{"lr", -1.0}}},
  };
  const std::string msg = config_error_message(j);
  CHECK(msg.find("config problems") != std::string::npos);
  CHECK(msg.find("unknown key \"surprise\"") != std::string::npos);
  CHECK(msg.find("data.vocab_size") != std::string::npos);
  CHECK(msg.find("model.arch") != std::string::npos);
  CHECK(msg.find("training.lr") != std::string::npos);
  CHECK(count_occurrences(msg, "\n  - ") >= 4);
}

TEST_CASE("run config rejects unknown keys at every level") {
  json j = {
      {"task", "mask"},
      {"extra_top", true},
      {"data",
       {{"extra_data", 1},
        {"synthetic", {{"n", 50}, {"extra_synth", 2}}}}},
      {"model", {{"extra_model", 3}}},
      {"training", {{"extra_training", 4}}},
      {"eval", {{"extra_eval", 5}}},
  };
  const std::string msg = config_error_message(j);
  CHECK(msg.find("\"extra_top\"") != std::string::npos);
  CHECK(msg.find("\"extra_data\"") != std::string::npos);
  CHECK(msg.find("\"extra_synth\"") != std::string::npos);
  CHECK(msg.find("\"extra_model\"") != std::string::npos);
  CHECK(msg.find("\"extra_training\"") != std::string::npos);
  CHECK(msg.find("\"extra_eval\"") != std::string::npos);
}

TEST_CASE("run config requires and validates the task") {
  CHECK(config_error_message(json::object()).find("task: required") !=
        std::string::npos);
  CHECK(config_error_message({{"task", "translate"}})
            .find("unknown task") != std::string::npos);
  CHECK_THROWS_AS(hs::cli::run_config_from_json(json::array()),
                  hs::ConfigError);
}

TEST_CASE("top level seed overrides both training seeds") {
  json detect = {{"task", "detect"},
                 {"training", {{"seed", 3}}},
                 {"seed", 42}};
  auto cfg = hs::cli::run_config_from_json(detect);
  CHECK(cfg.detect_model.training.seed == 42);

  json mask = {{"task", "mask"}, {"training", {{"seed", 3}}}, {"seed", 42}};
  auto mcfg = hs::cli::run_config_from_json(mask);
  CHECK(mcfg.mask_model.seed == 42);
}

TEST_CASE("mask model config requires divisible head count") {
  json j = {{"task", "mask"},
            {"model", {{"embed_dim", 10}, {"heads", 3}}}};
  CHECK(config_error_message(j).find("not divisible") != std::string::npos);
}

TEST_CASE("load_run_config distinguishes missing files from bad JSON") {
  const fs::path dir = fresh_dir("load_run_config");
  CHECK_THROWS_AS(hs::cli::load_run_config((dir / "absent.json").string()),
                  hs::DataError);
  write_file(dir / "broken.json", "{\"task\": ");
  CHECK_THROWS_AS(hs::cli::load_run_config((dir / "broken.json").string()),
                  hs::ConfigError);
}

TEST_CASE("preprocess reproduces the golden corpus byte for byte") {
  const fs::path dir = fresh_dir("golden");
  hs::cli::PreprocessOptions options;
  options.input = std::string(HS_SOURCE_DIR) + "/data/golden_raw.txt";
  options.output = (dir / "clean.txt").string();
  const auto summary = hs::cli::cmd_preprocess(options);
  CHECK(summary.lines_in == 20);
  CHECK(summary.lines_kept == 18);
  CHECK(summary.lines_dropped == 2);
  const std::string expected =
      read_file(std::string(HS_SOURCE_DIR) + "/data/golden_clean.txt");
  CHECK(read_file(options.output) == expected);
}

TEST_CASE("preprocess is idempotent on its own output") {
  const fs::path dir = fresh_dir("idempotent");
  hs::cli::PreprocessOptions options;
  options.input = std::string(HS_SOURCE_DIR) + "/data/golden_clean.txt";
  options.output = (dir / "again.txt").string();
  const auto summary = hs::cli::cmd_preprocess(options);
  CHECK(summary.lines_dropped == 0);
  CHECK(read_file(options.output) == read_file(options.input));
}

TEST_CASE("preprocess handles labeled and parallel formats") {
  const fs::path dir = fresh_dir("formats");
  write_file(dir / "labeled.tsv",
             "1\tأنا سعيدٌ جدا\tNOT\n"
             "2\thttp://spam.example 😀\tOFF\n"
             "3\tانت كلب\tOFF\n");
  hs::cli::PreprocessOptions labeled;
  labeled.input = (dir / "labeled.tsv").string();
  labeled.output = (dir / "labeled_clean.tsv").string();
  labeled.format = "labeled";
  const auto summary = hs::cli::cmd_preprocess(labeled);
  CHECK(summary.lines_in == 3);
  CHECK(summary.lines_kept == 2);  // the URL row cleans to empty
  auto loaded = hs::corpus::load_labeled_tsv(labeled.output);
  REQUIRE(loaded.items.size() == 2);
  CHECK(loaded.items[0].text == "انا سعيد جدا");
  CHECK(loaded.items[1].text == "انت كلب");
  CHECK(loaded.items[1].label == hs::Label::kOffensive);

  write_file(dir / "pairs.tsv", "انت كلب قذر\tانت *** ***\n");
  hs::cli::PreprocessOptions parallel;
  parallel.input = (dir / "pairs.tsv").string();
  parallel.output = (dir / "pairs_clean.tsv").string();
  parallel.format = "parallel";
  const auto psummary = hs::cli::cmd_preprocess(parallel);
  CHECK(psummary.lines_kept == 1);
  auto pairs = hs::corpus::load_parallel(parallel.output);
  REQUIRE(pairs.items.size() == 1);
  CHECK(pairs.items[0].target == "انت *** ***");

  hs::cli::PreprocessOptions bad = labeled;
  bad.format = "csv";
  CHECK_THROWS_AS(hs::cli::cmd_preprocess(bad), hs::ConfigError);
}

TEST_CASE("vocab command writes a loadable vocabulary") {
  const fs::path dir = fresh_dir("vocab");
  write_file(dir / "corpus.txt", "كلب قط كلب\nكلب بيت\n");
  hs::cli::VocabOptions options;
  options.input = (dir / "corpus.txt").string();
  options.output = (dir / "vocab.txt").string();
  options.size = 10;
  const auto summary = hs::cli::cmd_vocab(options);
  CHECK(summary.tokens > 0);
  CHECK(!summary.corpus_hash.empty());
  auto vocab = hs::text::Vocabulary::load(options.output);
  CHECK(vocab.contains("كلب"));
  CHECK(vocab.contains("قط"));
  CHECK(vocab.contains(hs::text::Vocabulary::pad_token()));
  CHECK(vocab.contains(hs::text::Vocabulary::unk_token()));

  // Target side of a parallel corpus keeps the '*' runs.
  write_file(dir / "pairs.tsv", "انت كلب\tانت ***\n");
  hs::cli::VocabOptions target;
  target.input = (dir / "pairs.tsv").string();
  target.output = (dir / "target_vocab.txt").string();
  target.format = "parallel";
  target.side = "target";
  hs::cli::cmd_vocab(target);
  auto tvocab = hs::text::Vocabulary::load(target.output);
  CHECK(tvocab.contains("***"));
  CHECK(tvocab.contains(hs::text::Vocabulary::start_token()));
}

TEST_CASE("detect training is reproducible and eval checks the vocabulary") {
  const fs::path dir = fresh_dir("detect_train");
  const json setup = tiny_detect_config(dir);

  hs::cli::TrainOptions train;
  train.config_path = setup.at("path").get<std::string>();
  train.report_dir = (dir / "run1").string();
  const auto outcome = hs::cli::cmd_train(train);
  CHECK(outcome.report.at("task") == "detect");
  CHECK(outcome.report.at("history").size() == 3);
  CHECK(fs::exists(outcome.checkpoint_path));
  CHECK(fs::exists(outcome.report_path));
  CHECK(outcome.report.at("config").at("model").at("vocab_size")
            .get<std::size_t>() > 0);

  hs::cli::TrainOptions rerun = train;
  rerun.report_dir = (dir / "run2").string();
  const auto second = hs::cli::cmd_train(rerun);
  CHECK(hs::hash_file(outcome.checkpoint_path) ==
        hs::hash_file(second.checkpoint_path));
  CHECK(outcome.report.at("history") == second.report.at("history"));

  // Evaluation against the synthetic test split written to disk.
  auto corpus = hs::corpus::generate_synthetic_corpus(60, 4, 24, 5);
  const fs::path test_tsv = dir / "test.tsv";
  hs::corpus::save_labeled_tsv(corpus.labeled.test, test_tsv.string());

  hs::cli::EvalOptions eval;
  eval.checkpoint = outcome.checkpoint_path;
  eval.test_path = test_tsv.string();
  eval.report_path = (dir / "eval.json").string();
  const auto result = hs::cli::cmd_eval(eval);
  CHECK(result.report.at("eval").contains("accuracy"));
  CHECK(result.table.find("Macro Avg") != std::string::npos);
  CHECK(fs::exists(eval.report_path));

  // A vocabulary built from the training split matches the checkpoint.
  const fs::path train_tsv = dir / "train.tsv";
  hs::corpus::save_labeled_tsv(corpus.labeled.train, train_tsv.string());
  hs::cli::VocabOptions vocab;
  vocab.input = train_tsv.string();
  vocab.output = (dir / "vocab.txt").string();
  vocab.format = "labeled";
  vocab.size = 100;
  hs::cli::cmd_vocab(vocab);
  hs::cli::EvalOptions matched = eval;
  matched.vocab_path = vocab.output;
  CHECK_NOTHROW(hs::cli::cmd_eval(matched));

  // One built from different text does not.
  write_file(dir / "other.txt", "قمر شمس نجم\n");
  hs::cli::VocabOptions other;
  other.input = (dir / "other.txt").string();
  other.output = (dir / "other_vocab.txt").string();
  hs::cli::cmd_vocab(other);
  hs::cli::EvalOptions mismatched = eval;
  mismatched.vocab_path = other.output;
  CHECK_THROWS_WITH_AS(hs::cli::cmd_eval(mismatched),
                       doctest::Contains("VocabMismatch"), hs::DataError);
}

TEST_CASE("report directory falls back to HS_REPORT_DIR") {
  const fs::path dir = fresh_dir("report_env");
  const json setup = tiny_detect_config(dir);
  const fs::path env_dir = dir / "from_env";
  setenv("HS_REPORT_DIR", env_dir.c_str(), 1);
  hs::cli::TrainOptions train;
  train.config_path = setup.at("path").get<std::string>();
  const auto outcome = hs::cli::cmd_train(train);
  unsetenv("HS_REPORT_DIR");
  CHECK(outcome.report_path.rfind(env_dir.string(), 0) == 0);
  CHECK(fs::exists(outcome.report_path));
}

TEST_CASE("oracle masking replaces lexicon words with star runs") {
  const fs::path dir = fresh_dir("oracle");
  hs::corpus::Lexicon lexicon;
  lexicon.add("كلب");
  lexicon.save((dir / "lexicon.tsv").string());

  hs::cli::MaskOptions options;
  options.text = "انت كلب";
  options.oracle = true;
  options.lexicon = (dir / "lexicon.tsv").string();
  const auto outcome = hs::cli::cmd_mask(options);
  CHECK(outcome.output == "انت ***");
  CHECK(outcome.lint_ok);

  hs::cli::MaskOptions missing;
  missing.text = "انت كلب";
  missing.oracle = true;
  CHECK_THROWS_AS(hs::cli::cmd_mask(missing), hs::ConfigError);
}

TEST_CASE("neural masking decodes deterministically from a checkpoint") {
  const fs::path dir = fresh_dir("neural_mask");
  const json setup = tiny_mask_config(dir);
  hs::cli::TrainOptions train;
  train.config_path = setup.at("path").get<std::string>();
  train.report_dir = (dir / "run").string();
  const auto trained = hs::cli::cmd_train(train);
  CHECK(trained.report.at("task") == "mask");
  CHECK(trained.report.contains("best_epoch"));

  auto corpus = hs::corpus::generate_synthetic_corpus(30, 3, 16, 23);
  REQUIRE(!corpus.parallel.train.empty());
  hs::cli::MaskOptions options;
  options.checkpoint = trained.checkpoint_path;
  options.text = corpus.parallel.train[0].source;
  const auto first = hs::cli::cmd_mask(options);
  const auto second = hs::cli::cmd_mask(options);
  CHECK(first.output == second.output);
  CHECK(first.lint_ok == hs::cli::passes_star_lint(first.output));

  hs::cli::MaskOptions no_checkpoint;
  no_checkpoint.text = "انت كلب";
  CHECK_THROWS_AS(hs::cli::cmd_mask(no_checkpoint), hs::ConfigError);
}

TEST_CASE("masker checkpoints cannot be evaluated as classifiers") {
  const fs::path dir = fresh_dir("kind_mix");
  const json setup = tiny_mask_config(dir);
  hs::cli::TrainOptions train;
  train.config_path = setup.at("path").get<std::string>();
  train.report_dir = (dir / "run").string();
  const auto trained = hs::cli::cmd_train(train);

  // Masker checkpoints are evaluated on parallel data, so handing the
  // checkpoint a labeled file must fail loudly rather than misparse.
  write_file(dir / "bad.tsv", "1\tانت كلب\tOFF\n");
  hs::cli::EvalOptions eval;
  eval.checkpoint = trained.checkpoint_path;
  eval.test_path = (dir / "bad.tsv").string();
  CHECK_THROWS_AS(hs::cli::cmd_eval(eval), hs::Error);
}

TEST_CASE("sweep trains sizes in descending order") {
  const fs::path dir = fresh_dir("sweep");
  json j = tiny_mask_config(dir).at("config");
  j["training"]["max_epochs"] = 2;
  const fs::path path = dir / "sweep.json";
  write_file(path, j.dump(2));

  hs::cli::SweepOptions options;
  options.config_path = path.string();
  options.sizes = {8, 16, 12};
  options.report_dir = (dir / "out").string();
  const auto outcome = hs::cli::cmd_sweep(options);
  const auto& rows = outcome.report.at("rows");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].at("vocab_size") == 16);
  CHECK(rows[1].at("vocab_size") == 12);
  CHECK(rows[2].at("vocab_size") == 8);
  for (const auto& row : rows) {
    CHECK(row.contains("unk"));
    CHECK(row.contains("bleu1"));
    CHECK(row.contains("bleu4"));
  }
  CHECK(outcome.table.find("Vocab Size") != std::string::npos);
  CHECK(fs::exists(outcome.report_path));

  CHECK(hs::cli::default_sweep_sizes() ==
        std::vector<std::size_t>{6000, 8000, 10000, 12000, 15000});

  // Sweeping a detect config is a configuration error.
  const json detect = tiny_detect_config(dir);
  hs::cli::SweepOptions bad;
  bad.config_path = detect.at("path").get<std::string>();
  bad.report_dir = (dir / "bad").string();
  CHECK_THROWS_AS(hs::cli::cmd_sweep(bad), hs::ConfigError);
}

TEST_CASE("star lint accepts pure runs and star-free tokens only") {
  CHECK(hs::cli::passes_star_lint("انت ***"));
  CHECK(hs::cli::passes_star_lint("*** ** *"));
  CHECK(hs::cli::passes_star_lint("كلام نظيف"));
  CHECK(hs::cli::passes_star_lint(""));
  CHECK(!hs::cli::passes_star_lint("انت **كلب"));
  CHECK(!hs::cli::passes_star_lint("ك*لب"));
}

TEST_CASE("binary maps errors to documented exit codes") {
  const fs::path dir = fresh_dir("exit_codes");

  ToolResult help = run_tool("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.output.find("preprocess") != std::string::npos);

  CHECK(run_tool("").exit_code == 2);            // missing subcommand
  CHECK(run_tool("--no-such-flag").exit_code == 2);

  // Oracle masking without a lexicon is a config error.
  ToolResult no_lexicon = run_tool("mask --oracle --text \"انت كلب\"");
  CHECK(no_lexicon.exit_code == 2);
  CHECK(no_lexicon.output.find("error:") != std::string::npos);

  // Missing files map to the data error code.
  CHECK(run_tool("eval --checkpoint /nonexistent.ckpt --test /nonexistent.tsv")
            .exit_code == 3);
  CHECK(run_tool("preprocess --in /nonexistent.txt --out /tmp/x.txt")
            .exit_code == 3);

  // Malformed config JSON is a config error.
  write_file(dir / "broken.json", "{\"task\": ");
  CHECK(run_tool("train --config " + (dir / "broken.json").string())
            .exit_code == 2);

  // A working oracle run exits cleanly and prints the masked text.
  hs::corpus::Lexicon lexicon;
  lexicon.add("كلب");
  lexicon.save((dir / "lexicon.tsv").string());
  ToolResult ok = run_tool("mask --oracle --lexicon " +
                           (dir / "lexicon.tsv").string() +
                           " --text \"انت كلب\"");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("انت ***") != std::string::npos);
}
