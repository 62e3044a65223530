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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hs/common/error.hpp"
#include "hs/common/rng.hpp"
#include "hs/corpus/dataset.hpp"
#include "hs/maskgen/masker.hpp"
#include "hs/maskgen/seq2seq.hpp"
#include "hs/metrics/bleu.hpp"
#include "hs/nn/graph.hpp"
#include "hs/text/vocab.hpp"

using namespace hs;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

maskgen::Seq2SeqConfig tiny_config(std::size_t sv, std::size_t tv) {
  maskgen::Seq2SeqConfig cfg;
  cfg.source_vocab_size = sv;
  cfg.target_vocab_size = tv;
  cfg.seq_len = 8;
  cfg.embed_dim = 16;
  cfg.heads = 4;
  cfg.ff_dim = 32;
  return cfg;
}

std::vector<std::vector<int>> random_ids(Rng& rng, std::size_t batch,
                                         std::size_t len, int vocab) {
  std::vector<std::vector<int>> out(batch, std::vector<int>(len));
  for (auto& row : out)
    for (auto& id : row)
      id = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab - 4)));
  return out;
}

}  // namespace

TEST_CASE("causal mask allows exactly the lower triangle") {
  auto mask = maskgen::causal_mask(3);
  REQUIRE(mask.shape() == std::vector<std::size_t>{3, 3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(mask.at(i, j) == (j <= i ? 1.0 : 0.0));
  CHECK_THROWS_WITH_AS(maskgen::causal_mask(0), doctest::Contains("BadSize"),
                       ValueError);
}

TEST_CASE("source attention mask blocks pad key positions") {
  auto mask = maskgen::source_attention_mask({{4, 5, 0}, {6, 0, 0}}, 2);
  REQUIRE(mask.shape() == std::vector<std::size_t>{2, 2, 3});
  for (std::size_t q = 0; q < 2; ++q) {
    CHECK(mask.at(0, q, 0) == 1.0);
    CHECK(mask.at(0, q, 1) == 1.0);
    CHECK(mask.at(0, q, 2) == 0.0);
    CHECK(mask.at(1, q, 0) == 1.0);
    CHECK(mask.at(1, q, 1) == 0.0);
    CHECK(mask.at(1, q, 2) == 0.0);
  }
  CHECK_THROWS_WITH_AS(maskgen::source_attention_mask({}, 2),
                       doctest::Contains("EmptyPairList"), ValueError);
}

TEST_CASE("prepare_pairs wraps targets and shifts labels") {
  auto src_vocab = text::build_word_vocab({"ا ب ج"}, 10);
  auto tgt_vocab = text::build_word_vocab({"ا *** ب"}, 10);
  std::vector<corpus::ParallelPair> pairs{{"ا ب", "ا ***"}};

  auto prep = maskgen::prepare_pairs(pairs, src_vocab, tgt_vocab, 6);
  REQUIRE(prep.size() == 1);
  REQUIRE(prep.src[0].size() == 6);
  REQUIRE(prep.dec_input[0].size() == 6);
  REQUIRE(prep.labels[0].size() == 6);

  const int kPad = text::Vocabulary::kPadId;
  const int kStart = text::Vocabulary::kStartId;
  const int kEnd = text::Vocabulary::kEndId;
  const int id_alef = tgt_vocab.id("ا");
  const int id_stars = tgt_vocab.id("***");

  CHECK(prep.dec_input[0] ==
        std::vector<int>{kStart, id_alef, id_stars, kEnd, kPad, kPad});
  CHECK(prep.labels[0] ==
        std::vector<int>{id_alef, id_stars, kEnd, kPad, kPad, kPad});
  CHECK(prep.label_mask[0] ==
        std::vector<bool>{true, true, true, false, false, false});

  CHECK(prep.src[0][0] == src_vocab.id("ا"));
  CHECK(prep.src[0][1] == src_vocab.id("ب"));
  CHECK(prep.src[0][2] == kPad);
}

TEST_CASE("prepare_pairs validates its inputs") {
  auto full = text::build_word_vocab({"ا"}, 8);
  auto basic = text::build_word_vocab({"ا"}, 8,
                                      text::Vocabulary::Specials::kBasic);
  std::vector<corpus::ParallelPair> pairs{{"ا", "ا"}};

  CHECK_THROWS_WITH_AS(maskgen::prepare_pairs({}, full, full, 6),
                       doctest::Contains("EmptyPairList"), ValueError);
  CHECK_THROWS_WITH_AS(maskgen::prepare_pairs(pairs, full, basic, 6),
                       doctest::Contains("MissingSpecials"), ValueError);
  CHECK_THROWS_WITH_AS(maskgen::prepare_pairs(pairs, full, full, 0),
                       doctest::Contains("BadLength"), ValueError);
}

TEST_CASE("teacher forcing shift holds over a synthetic corpus") {
  auto corpus = corpus::generate_synthetic_corpus(40, 4, 24, 9);
  std::vector<std::string> src_texts;
  std::vector<std::string> tgt_texts;
  for (const auto& p : corpus.parallel.train) {
    src_texts.push_back(p.source);
    tgt_texts.push_back(p.target);
  }
  auto src_vocab = text::build_word_vocab(src_texts, 40);
  auto tgt_vocab = text::build_word_vocab(tgt_texts, 40);
  const std::size_t seq_len = 12;
  auto prep = maskgen::prepare_pairs(corpus.parallel.train, src_vocab,
                                     tgt_vocab, seq_len);

  for (std::size_t i = 0; i < prep.size(); ++i) {
    CHECK(prep.dec_input[i][0] == text::Vocabulary::kStartId);
    for (std::size_t j = 0; j + 1 < seq_len; ++j) {
      CHECK(prep.labels[i][j] == prep.dec_input[i][j + 1]);
    }
    for (std::size_t j = 0; j < seq_len; ++j) {
      CHECK(prep.label_mask[i][j] ==
            (prep.labels[i][j] != text::Vocabulary::kPadId));
    }
    // Every row has at least one scored position.
    CHECK(prep.label_mask[i][0]);
  }
}

TEST_CASE("seq2seq config survives a json round trip") {
  auto cfg = tiny_config(33, 22);
  cfg.encoder_layers = 2;
  cfg.decoder_layers = 3;
  cfg.dropout = 0.05;
  cfg.lr = 0.7;
  cfg.batch_size = 5;
  cfg.max_epochs = 11;
  cfg.patience = 6;
  cfg.l2_lambda = 0.125;
  cfg.seed = 77;

  auto back = maskgen::seq2seq_config_from_json(maskgen::to_json(cfg));
  CHECK(back.source_vocab_size == cfg.source_vocab_size);
  CHECK(back.target_vocab_size == cfg.target_vocab_size);
  CHECK(back.seq_len == cfg.seq_len);
  CHECK(back.embed_dim == cfg.embed_dim);
  CHECK(back.heads == cfg.heads);
  CHECK(back.ff_dim == cfg.ff_dim);
  CHECK(back.encoder_layers == cfg.encoder_layers);
  CHECK(back.decoder_layers == cfg.decoder_layers);
  CHECK(back.dropout == cfg.dropout);
  CHECK(back.lr == cfg.lr);
  CHECK(back.batch_size == cfg.batch_size);
  CHECK(back.max_epochs == cfg.max_epochs);
  CHECK(back.patience == cfg.patience);
  CHECK(back.l2_lambda == cfg.l2_lambda);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("masker parameter totals match the layer shape sums") {
  // Hand-summed at embed 16, heads 4, ff 32, seq 8, vocabs 20/12:
  // embeddings 320+128+192+128, encoder block 2224, decoder block 3344,
  // head 204.
  auto cfg = tiny_config(20, 12);
  {
    maskgen::MaskerModel model(cfg, 1);
    CHECK(model.params().parameter_count() == 6540);
  }
  {
    auto deeper = cfg;
    deeper.encoder_layers = 2;
    maskgen::MaskerModel model(deeper, 1);
    CHECK(model.params().parameter_count() == 6540 + 2224);
  }
  {
    auto deeper = cfg;
    deeper.decoder_layers = 2;
    maskgen::MaskerModel model(deeper, 1);
    CHECK(model.params().parameter_count() == 6540 + 3344);
  }
}

TEST_CASE("masker construction validates the config") {
  auto bad_heads = tiny_config(20, 12);
  bad_heads.heads = 3;  // 16 % 3 != 0
  CHECK_THROWS_WITH_AS(maskgen::MaskerModel(bad_heads, 1),
                       doctest::Contains("DimNotDivisible"), ShapeError);

  auto no_vocab = tiny_config(20, 12);
  no_vocab.target_vocab_size = 0;
  CHECK_THROWS_WITH_AS(maskgen::MaskerModel(no_vocab, 1),
                       doctest::Contains("ConfigMismatch"), ConfigError);

  auto no_layers = tiny_config(20, 12);
  no_layers.encoder_layers = 0;
  CHECK_THROWS_AS(maskgen::MaskerModel(no_layers, 1), ConfigError);
}

TEST_CASE("forward and encode emit the documented shapes") {
  auto cfg = tiny_config(20, 12);
  maskgen::MaskerModel model(cfg, 5);
  Rng rng(3);
  auto src = random_ids(rng, 2, 8, 20);
  auto dec = random_ids(rng, 2, 8, 12);

  auto logits = model.forward(src, dec, false);
  CHECK(logits->value.shape() == std::vector<std::size_t>{2, 8, 12});
  logits->value.check_finite("logits");

  auto memory = model.encode(src, false);
  CHECK(memory->value.shape() == std::vector<std::size_t>{2, 8, 16});

  CHECK_THROWS_AS(model.forward({}, dec, false), ValueError);
  CHECK_THROWS_AS(model.forward(src, {{1, 2, 3}}, false), ConfigError);
  auto lopsided = src;
  lopsided.pop_back();
  CHECK_THROWS_AS(model.forward(lopsided, dec, false), ConfigError);
  CHECK_THROWS_AS(model.forward(src, dec, true, nullptr), ConfigError);
}

TEST_CASE("equal seeds build identical maskers") {
  auto cfg = tiny_config(20, 12);
  maskgen::MaskerModel a(cfg, 8);
  maskgen::MaskerModel b(cfg, 8);
  maskgen::MaskerModel c(cfg, 9);
  Rng rng(4);
  auto src = random_ids(rng, 2, 8, 20);
  auto dec = random_ids(rng, 2, 8, 12);

  auto la = a.forward(src, dec, false);
  auto lb = b.forward(src, dec, false);
  auto lc = c.forward(src, dec, false);
  bool same = true;
  bool differs = false;
  for (std::size_t i = 0; i < la->value.size(); ++i) {
    same &= la->value[i] == lb->value[i];
    differs |= la->value[i] != lc->value[i];
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("decoder logits are causal") {
  // Perturbing decoder tokens after position t must leave rows <= t
  // untouched.
  auto cfg = tiny_config(24, 14);
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    maskgen::MaskerModel model(cfg, 100 + static_cast<std::uint64_t>(trial));
    auto src = random_ids(rng, 1, 8, 24);
    auto dec = random_ids(rng, 1, 8, 14);
    const std::size_t t = rng.below(7);  // leaves at least one later slot

    auto base = model.forward(src, dec, false);
    auto perturbed = dec;
    for (std::size_t j = t + 1; j < 8; ++j) {
      perturbed[0][j] =
          4 + static_cast<int>(rng.below(10));
    }
    auto changed = model.forward(src, perturbed, false);

    const std::size_t v = cfg.target_vocab_size;
    double max_diff = 0.0;
    for (std::size_t row = 0; row <= t; ++row) {
      for (std::size_t k = 0; k < v; ++k) {
        max_diff = std::max(max_diff,
                            std::abs(base->value[row * v + k] -
                                     changed->value[row * v + k]));
      }
    }
    CAPTURE(trial);
    CHECK(max_diff < 1e-6);
  }
}

TEST_CASE("loss ignores label changes at masked positions") {
  auto corpus = corpus::generate_synthetic_corpus(24, 3, 20, 13);
  std::vector<std::string> src_texts;
  std::vector<std::string> tgt_texts;
  for (const auto& p : corpus.parallel.train) {
    src_texts.push_back(p.source);
    tgt_texts.push_back(p.target);
  }
  auto src_vocab = text::build_word_vocab(src_texts, 40);
  auto tgt_vocab = text::build_word_vocab(tgt_texts, 40);
  auto prep = maskgen::prepare_pairs(corpus.parallel.train, src_vocab,
                                     tgt_vocab, 12);

  auto cfg = tiny_config(src_vocab.token_count(), tgt_vocab.token_count());
  cfg.seq_len = 12;
  maskgen::MaskerModel model(cfg, 19);

  auto logits = model.forward(prep.src, prep.dec_input, false);
  auto base = nn::masked_ce_mean(logits, prep.labels, prep.label_mask);

  auto scrambled = prep.labels;
  bool any_masked = false;
  for (std::size_t i = 0; i < scrambled.size(); ++i) {
    for (std::size_t j = 0; j < scrambled[i].size(); ++j) {
      if (!prep.label_mask[i][j]) {
        scrambled[i][j] = 5;  // arbitrary in-vocab id
        any_masked = true;
      }
    }
  }
  REQUIRE(any_masked);
  auto logits2 = model.forward(prep.src, prep.dec_input, false);
  auto moved = nn::masked_ce_mean(logits2, scrambled, prep.label_mask);
  CHECK(base->value[0] == moved->value[0]);
}

namespace {

struct MaskTrainFixture {
  corpus::SyntheticCorpus corpus =
      corpus::generate_synthetic_corpus(30, 3, 16, 23);
  text::Vocabulary src_vocab;
  text::Vocabulary tgt_vocab;
  maskgen::PreparedPairs train;
  maskgen::PreparedPairs dev;
  maskgen::Seq2SeqConfig cfg;

  MaskTrainFixture() {
    std::vector<std::string> src_texts;
    std::vector<std::string> tgt_texts;
    for (const auto& p : corpus.parallel.train) {
      src_texts.push_back(p.source);
      tgt_texts.push_back(p.target);
    }
    src_vocab = text::build_word_vocab(src_texts, 48);
    tgt_vocab = text::build_word_vocab(tgt_texts, 48);
    const std::size_t seq_len = 12;
    train = maskgen::prepare_pairs(corpus.parallel.train, src_vocab,
                                   tgt_vocab, seq_len);
    dev = maskgen::prepare_pairs(corpus.parallel.dev, src_vocab, tgt_vocab,
                                 seq_len);

    cfg = tiny_config(src_vocab.token_count(), tgt_vocab.token_count());
    cfg.seq_len = seq_len;
    cfg.heads = 2;
    cfg.batch_size = 8;
    cfg.max_epochs = 4;
    cfg.patience = 4;
    cfg.lr = 3e-3;
  }
};

}  // namespace

TEST_CASE("masker training lowers the loss deterministically") {
  MaskTrainFixture fx;
  auto run = [&] {
    maskgen::MaskerModel model(fx.cfg, 31);
    return maskgen::train_masker(model, fx.train, fx.dev);
  };
  auto r1 = run();
  auto r2 = run();

  REQUIRE(r1.history.size() == r1.epochs_run);
  CHECK(r1.history.back().train_loss < r1.history.front().train_loss);
  for (const auto& e : r1.history) {
    CHECK(std::isfinite(e.train_loss));
    CHECK(std::isfinite(e.dev_loss));
  }

  REQUIRE(r1.history.size() == r2.history.size());
  CHECK(r1.best_epoch == r2.best_epoch);
  CHECK(r1.stopped_early == r2.stopped_early);
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
    CHECK(r1.history[i].dev_loss == r2.history[i].dev_loss);
  }
}

TEST_CASE("masker training restores the best dev epoch") {
  MaskTrainFixture fx;
  auto cfg = fx.cfg;
  cfg.max_epochs = 6;
  cfg.patience = 6;   // never stops early inside the budget
  cfg.lr = 2e-2;      // coarse steps so dev loss visits a minimum and leaves
  // Dev fits one eval batch, so the recomputed loss must be bit-equal to
  // the history entry of the restored epoch.
  REQUIRE(fx.dev.size() <= cfg.batch_size);
  maskgen::MaskerModel model(cfg, 31);
  auto result = maskgen::train_masker(model, fx.train, fx.dev);

  auto logits = model.forward(fx.dev.src, fx.dev.dec_input, false);
  auto loss = nn::masked_ce_mean(logits, fx.dev.labels, fx.dev.label_mask);
  CHECK(loss->value[0] == result.history[result.best_epoch].dev_loss);

  double best = result.history[0].dev_loss;
  for (const auto& e : result.history) best = std::min(best, e.dev_loss);
  CHECK(result.history[result.best_epoch].dev_loss == best);
}

TEST_CASE("masker training rejects empty splits") {
  MaskTrainFixture fx;
  maskgen::MaskerModel model(fx.cfg, 31);
  maskgen::PreparedPairs empty;
  CHECK_THROWS_WITH_AS(maskgen::train_masker(model, empty, fx.dev),
                       doctest::Contains("EmptySplit"), ValueError);
  CHECK_THROWS_WITH_AS(maskgen::train_masker(model, fx.train, empty),
                       doctest::Contains("EmptySplit"), ValueError);
}

TEST_CASE("early stopping triggers on a flat dev loss") {
  MaskTrainFixture fx;
  auto cfg = fx.cfg;
  cfg.max_epochs = 30;
  cfg.patience = 1;
  cfg.lr = 5e-2;  // unstable on purpose
  maskgen::MaskerModel model(cfg, 31);
  auto result = maskgen::train_masker(model, fx.train, fx.dev);
  CHECK(result.epochs_run < cfg.max_epochs);
  CHECK(result.stopped_early);
}

TEST_CASE("greedy decode is deterministic and bounded") {
  MaskTrainFixture fx;
  maskgen::MaskerModel model(fx.cfg, 41);
  const std::string source = fx.corpus.parallel.train[0].source;

  auto a = maskgen::greedy_decode(model, fx.src_vocab, fx.tgt_vocab, source,
                                  25);
  auto b = maskgen::greedy_decode(model, fx.src_vocab, fx.tgt_vocab, source,
                                  25);
  CHECK(a.text == b.text);
  CHECK(a.token_ids == b.token_ids);
  CHECK(a.unk_count == b.unk_count);

  // The decoder window holds [start] plus at most seq_len - 1 tokens.
  CHECK(a.token_ids.size() <= fx.cfg.seq_len - 1);

  auto short_run = maskgen::greedy_decode(model, fx.src_vocab, fx.tgt_vocab,
                                          source, 2);
  CHECK(short_run.token_ids.size() <= 2);

  std::size_t unks = 0;
  for (int id : a.token_ids)
    if (id == text::Vocabulary::kUnkId) ++unks;
  CHECK(a.unk_count == unks);
  CHECK(a.text == text::decode(a.token_ids, fx.tgt_vocab));
}

TEST_CASE("a tiny masker overfits a handful of pairs") {
  // Six short pairs, one batch. The model has plenty of capacity, so the
  // loss should collapse and the decodes should reproduce the targets.
  corpus::SyntheticCorpus synth = corpus::generate_synthetic_corpus(8, 2, 10, 3);
  std::vector<corpus::ParallelPair> pairs(synth.parallel.train.begin(),
                                          synth.parallel.train.begin() + 6);
  std::vector<std::string> src_texts;
  std::vector<std::string> tgt_texts;
  for (const auto& p : pairs) {
    src_texts.push_back(p.source);
    tgt_texts.push_back(p.target);
  }
  auto src_vocab = text::build_word_vocab(src_texts, 32);
  auto tgt_vocab = text::build_word_vocab(tgt_texts, 32);

  maskgen::Seq2SeqConfig cfg;
  cfg.source_vocab_size = src_vocab.token_count();
  cfg.target_vocab_size = tgt_vocab.token_count();
  cfg.seq_len = 12;
  cfg.embed_dim = 32;
  cfg.heads = 2;
  cfg.ff_dim = 64;
  cfg.dropout = 0.0;
  cfg.batch_size = 6;
  cfg.max_epochs = 150;
  cfg.patience = 150;
  cfg.lr = 3e-3;
  cfg.seed = 7;

  auto prep = maskgen::prepare_pairs(pairs, src_vocab, tgt_vocab, cfg.seq_len);
  maskgen::MaskerModel model(cfg, 7);
  auto result = maskgen::train_masker(model, prep, prep);

  CHECK(result.history.back().train_loss <
        0.25 * result.history.front().train_loss);

  std::size_t exact = 0;
  for (const auto& pair : pairs) {
    auto decoded = maskgen::greedy_decode(model, src_vocab, tgt_vocab,
                                          pair.source, cfg.seq_len);
    if (decoded.text == pair.target) ++exact;
  }
  CHECK(exact >= 4);

  auto report = maskgen::evaluate_masker(model, src_vocab, tgt_vocab, pairs);
  CHECK(report.bleu[0] > 0.6);

  // evaluate_masker is plumbing over greedy_decode plus corpus bleu.
  metrics::TokenizedCorpus cands;
  metrics::TokenizedCorpus refs;
  long long unks = 0;
  for (const auto& pair : pairs) {
    auto decoded = maskgen::greedy_decode(model, src_vocab, tgt_vocab,
                                          pair.source, cfg.seq_len);
    unks += static_cast<long long>(decoded.unk_count);
    cands.push_back(metrics::whitespace_tokens(decoded.text));
    refs.push_back(metrics::whitespace_tokens(pair.target));
  }
  auto expected = metrics::bleu(cands, refs);
  CHECK(report.bleu[0] == expected.bleu[0]);
  CHECK(report.bleu[3] == expected.bleu[3]);
  CHECK(report.brevity_penalty == expected.brevity_penalty);
  CHECK(report.unk_count == unks);

  CHECK_THROWS_WITH_AS(
      maskgen::evaluate_masker(model, src_vocab, tgt_vocab, {}),
      doctest::Contains("EmptySplit"), ValueError);

  // Checkpoints must reload into a decoder with identical behavior.
  const auto path = temp_path("hs_masker_roundtrip.ckpt");
  maskgen::save_masker(path, model, src_vocab, tgt_vocab);
  auto loaded = maskgen::load_masker(path);
  std::remove(path.c_str());

  CHECK(loaded.source_vocab.token_list() == src_vocab.token_list());
  CHECK(loaded.target_vocab.token_list() == tgt_vocab.token_list());
  CHECK(loaded.model->config().embed_dim == cfg.embed_dim);
  for (const auto& pair : pairs) {
    auto before = maskgen::greedy_decode(model, src_vocab, tgt_vocab,
                                         pair.source, cfg.seq_len);
    auto after = maskgen::greedy_decode(*loaded.model, loaded.source_vocab,
                                        loaded.target_vocab, pair.source,
                                        cfg.seq_len);
    CHECK(before.text == after.text);
    CHECK(before.token_ids == after.token_ids);
  }
}

TEST_CASE("masker checkpoints reject other kinds and missing files") {
  CHECK_THROWS_AS(maskgen::load_masker(temp_path("hs_masker_absent.ckpt")),
                  DataError);
}
