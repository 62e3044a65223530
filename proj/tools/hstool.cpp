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

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hs/cli/commands.hpp"
#include "hs/common/error.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"hstoolkit: offensive-language detection and masking"};
  app.require_subcommand(1);

  hs::cli::PreprocessOptions pre;
  CLI::App* preprocess =
      app.add_subcommand("preprocess", "Clean a corpus file");
  preprocess->add_option("--in", pre.input, "input file")->required();
  preprocess->add_option("--out", pre.output, "output file")->required();
  preprocess->add_option("--format", pre.format,
                         "plain | labeled | parallel");
  preprocess->callback([&] {
    auto summary = hs::cli::cmd_preprocess(pre);
    std::cout << hs::cli::to_json(summary).dump(2) << "\n";
  });

  hs::cli::VocabOptions voc;
  CLI::App* vocab =
      app.add_subcommand("vocab", "Build a word vocabulary file");
  vocab->add_option("--in", voc.input, "input corpus")->required();
  vocab->add_option("--out", voc.output, "vocabulary file")->required();
  vocab->add_option("--format", voc.format, "plain | labeled | parallel");
  vocab->add_option("--side", voc.side, "parallel input: source | target");
  vocab->add_option("--size", voc.size, "maximum tokens including specials");
  vocab->add_flag("--basic-specials", voc.basic_specials,
                  "layout without [start]/[end]");
  vocab->callback([&] {
    auto summary = hs::cli::cmd_vocab(voc);
    std::cout << nlohmann::json{{"tokens", summary.tokens},
                                {"corpus_hash", summary.corpus_hash}}
                     .dump(2)
              << "\n";
  });

  hs::cli::TrainOptions tr;
  long long seed_flag = -1;
  CLI::App* train = app.add_subcommand("train", "Train from a run config");
  train->add_option("--config", tr.config_path, "run config JSON")
      ->required();
  train->add_option("--report-dir", tr.report_dir,
                    "overrides the config and HS_REPORT_DIR");
  train->add_option("--checkpoint", tr.checkpoint, "overrides the config");
  train->add_option("--seed", seed_flag, "overrides every config seed");
  train->callback([&] {
    if (seed_flag >= 0) {
      tr.has_seed = true;
      tr.seed = static_cast<std::uint64_t>(seed_flag);
    }
    auto outcome = hs::cli::cmd_train(tr);
    for (const auto& table : outcome.tables) std::cout << table << "\n";
    std::cout << "report: " << outcome.report_path << "\n";
    std::cout << "checkpoint: " << outcome.checkpoint_path << "\n";
  });

  hs::cli::EvalOptions ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", ev.checkpoint, "trained model")
      ->required();
  eval->add_option("--test", ev.test_path, "test corpus")->required();
  eval->add_option("--vocab", ev.vocab_path,
                   "fail unless this vocabulary matches the checkpoint");
  eval->add_option("--report", ev.report_path, "write the report JSON here");
  eval->callback([&] {
    auto outcome = hs::cli::cmd_eval(ev);
    std::cout << outcome.table << "\n";
    if (!ev.report_path.empty()) {
      std::cout << "report: " << ev.report_path << "\n";
    }
  });

  hs::cli::MaskOptions mk;
  CLI::App* mask = app.add_subcommand("mask", "Mask offensive words");
  mask->add_option("--checkpoint", mk.checkpoint, "masker checkpoint");
  mask->add_option("--text", mk.text, "input text")->required();
  mask->add_flag("--oracle", mk.oracle, "rule-based masking via a lexicon");
  mask->add_option("--lexicon", mk.lexicon, "lexicon file for --oracle");
  mask->callback([&] {
    auto outcome = hs::cli::cmd_mask(mk);
    if (!outcome.lint_ok) {
      std::cerr << "warning: output failed the star-run lint\n";
    }
    std::cout << outcome.output << "\n";
  });

  hs::cli::SweepOptions sw;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Train maskers across vocabulary sizes");
  sweep->add_option("--config", sw.config_path, "mask run config JSON")
      ->required();
  sweep->add_option("--sizes", sw.sizes, "vocabulary sizes")
      ->delimiter(',');
  sweep->add_option("--report-dir", sw.report_dir,
                    "overrides the config and HS_REPORT_DIR");
  sweep->callback([&] {
    auto outcome = hs::cli::cmd_sweep(sw);
    std::cout << outcome.table << "\n";
    std::cout << "report: " << outcome.report_path << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad flags are config errors
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hs::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hs::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const hs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
