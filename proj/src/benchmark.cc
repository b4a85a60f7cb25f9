// benchmark.cc

// Copyright 2026  The joinap-lab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "joinap/benchmark.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>

namespace joinap {

namespace {

uint64_t SeedFor(uint64_t seed, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
  uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<uint64_t>(out[0]) << 32) | out[1];
}

// Takes the first `n` entries of a shuffled copy.
std::vector<std::string> Sample(std::vector<std::string> pool, size_t n, std::mt19937_64 &rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(n);
  return pool;
}

Corpus Slice(const Corpus &c, size_t begin, size_t end) {
  Corpus out;
  out.units = c.units;
  out.utterances.assign(c.utterances.begin() + static_cast<std::ptrdiff_t>(begin),
                        c.utterances.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace

BenchmarkConfig::BenchmarkConfig() {
  train.encoder.input_dim = frame_dim;
  train.encoder.context = 2;
  train.encoder.hidden_dims = {96};
  train.encoder.output_dim = 64;
  train.max_epochs = 15;
  train.batch_size = 8;
  finetune = train;
  finetune.max_epochs = 20;
  finetune.dev_fraction = 0.0;
}

void BenchmarkConfig::Validate() const {
  if (num_train_languages < 1 || core_size < 1 || extra_pool < 0 || heldout_unseen < 0)
    Fail(ErrorCode::kInvalidConfig, "benchmark sizes must be positive");
  if (extras_per_language > extra_pool)
    Fail(ErrorCode::kInvalidConfig, "extras per language exceed the extra pool");
  if (heldout_core > core_size) Fail(ErrorCode::kInvalidConfig, "held-out core exceeds the core");
  if (frame_dim != train.encoder.input_dim || frame_dim != finetune.encoder.input_dim)
    Fail(ErrorCode::kInvalidConfig, "frame dim must equal the encoder input dim");
  if (train_utterances < 1 || test_utterances < 1 || heldout_utterances < 2)
    Fail(ErrorCode::kInvalidConfig, "utterance counts too small");
  if (!(heldout_test_fraction > 0.0 && heldout_test_fraction < 1.0) ||
      !(finetune_fraction > 0.0 && finetune_fraction + heldout_test_fraction <= 1.0))
    Fail(ErrorCode::kInvalidConfig, "bad held-out split fractions");
  train.Validate();
  finetune.Validate();
}

BenchmarkGeometry SampleGeometry(const FeatureTable &table, const BenchmarkConfig &cfg,
                                 uint64_t seed) {
  cfg.Validate();
  const size_t needed = static_cast<size_t>(cfg.core_size + cfg.extra_pool + cfg.heldout_unseen);
  std::vector<std::string> phones = table.Phones();
  if (phones.size() < needed)
    Fail(ErrorCode::kInvalidConfig, "feature table has too few phones for the benchmark");
  std::mt19937_64 rng(SeedFor(seed, 0));
  std::shuffle(phones.begin(), phones.end(), rng);
  auto it = phones.begin();
  const std::vector<std::string> core(it, it + cfg.core_size);
  it += cfg.core_size;
  const std::vector<std::string> extras(it, it + cfg.extra_pool);
  it += cfg.extra_pool;
  const std::vector<std::string> novel(it, it + cfg.heldout_unseen);

  BenchmarkGeometry geo;
  std::set<std::string> used_extras;
  for (int l = 0; l < cfg.num_train_languages; ++l) {
    LanguageInventory inv;
    inv.language_id = "train" + std::to_string(l + 1);
    inv.phones = core;
    for (auto &p : Sample(extras, static_cast<size_t>(cfg.extras_per_language), rng)) {
      used_extras.insert(p);
      inv.phones.push_back(std::move(p));
    }
    geo.train.push_back(std::move(inv));
  }
  if (static_cast<size_t>(cfg.heldout_seen_extras) > used_extras.size())
    Fail(ErrorCode::kInvalidConfig, "not enough training extras to share with the held-out language");

  geo.heldout.language_id = "heldout";
  geo.heldout.phones = Sample(core, static_cast<size_t>(cfg.heldout_core), rng);
  for (auto &p : Sample({used_extras.begin(), used_extras.end()},
                        static_cast<size_t>(cfg.heldout_seen_extras), rng))
    geo.heldout.phones.push_back(std::move(p));
  geo.heldout.phones.insert(geo.heldout.phones.end(), novel.begin(), novel.end());
  geo.unseen = novel;
  return geo;
}

std::string_view BenchConditionName(BenchCondition c) {
  switch (c) {
    case BenchCondition::kMultilingual: return "multilingual";
    case BenchCondition::kZeroShot: return "zero_shot";
    case BenchCondition::kFewShot: return "few_shot";
  }
  return "";
}

std::string MethodName(HeadKind head) {
  return head == HeadKind::kFlat ? "flat" : "joinap-" + std::string(HeadKindName(head));
}

std::vector<ReportRecord> RunBenchmark(const FeatureTable &table, const BenchmarkConfig &cfg,
                                       const BenchmarkRequest &request,
                                       const std::function<void(const std::string &)> &log) {
  cfg.Validate();
  auto wants = [&](BenchCondition c) {
    return std::find(request.conditions.begin(), request.conditions.end(), c) !=
           request.conditions.end();
  };
  auto note = [&](const std::string &s) {
    if (log) log(s);
  };

  std::vector<ReportRecord> records;
  for (uint64_t seed : request.seeds) {
    const BenchmarkGeometry geo = SampleGeometry(table, cfg, seed);
    const Matrix emission = MakeEmissionMap(cfg.frame_dim, SeedFor(seed, 1));

    auto spec_for = [&](const LanguageInventory &inv, int count, uint64_t stream) {
      SynthLanguageSpec s;
      s.language_id = inv.language_id;
      s.inventory = inv.phones;
      s.min_frames_per_phone = cfg.min_frames_per_phone;
      s.max_frames_per_phone = cfg.max_frames_per_phone;
      s.noise_std = cfg.noise_std;
      s.language_offset_std = cfg.language_offset_std;
      s.min_phones = cfg.min_phones;
      s.max_phones = cfg.max_phones;
      s.num_utterances = count;
      s.seed = SeedFor(seed, stream);
      return s;
    };

    std::vector<Corpus> train_sets, test_sets;
    for (size_t l = 0; l < geo.train.size(); ++l) {
      const Corpus all = GenerateLanguage(
          spec_for(geo.train[l], cfg.train_utterances + cfg.test_utterances, 100 + l), table,
          emission);
      train_sets.push_back(Slice(all, 0, static_cast<size_t>(cfg.train_utterances)));
      test_sets.push_back(Slice(all, static_cast<size_t>(cfg.train_utterances),
                                all.utterances.size()));
    }
    const Corpus heldout = GenerateLanguage(
        spec_for(geo.heldout, cfg.heldout_utterances, 999), table, emission);
    const size_t n = heldout.utterances.size();
    const size_t num_test = std::max<size_t>(
        1, static_cast<size_t>(std::lround(cfg.heldout_test_fraction * static_cast<double>(n))));
    const size_t num_ft = std::max<size_t>(
        1, static_cast<size_t>(std::lround(cfg.finetune_fraction * static_cast<double>(n))));
    const Corpus heldout_test = Slice(heldout, n - num_test, n);
    const Corpus heldout_ft = Slice(heldout, 0, num_ft);

    const UniversalPhoneSet set = UniversalPhoneSet::Merge(geo.train);
    const Matrix phono = EncodeUnits(table, set.Units());
    const std::vector<std::string> seen_list = set.Phones();
    const std::set<std::string> seen(seen_list.begin(), seen_list.end());

    for (HeadKind head : request.heads) {
      TrainConfig tc = cfg.train;
      tc.head = head;
      tc.seed = SeedFor(seed, 2);
      const TrainResult trained = TrainMultilingual(train_sets, set, phono, tc);
      note("seed " + std::to_string(seed) + " " + MethodName(head) + ": trained " +
           std::to_string(trained.report.epochs.size() - 1) + " epochs, checksum " +
           HexDigest(trained.report.checksum));

      auto record = [&](const std::string &language, BenchCondition c, const EvalResult &r) {
        records.push_back({MethodName(head), language, std::string(BenchConditionName(c)), seed,
                           r.per, r.seen_per, r.unseen_per});
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %-12s %-8s PER %.4f seen %.4f unseen %.4f",
                      std::string(BenchConditionName(c)).c_str(), language.c_str(), r.per,
                      r.seen_per, r.unseen_per);
        note(buf);
      };

      if (wants(BenchCondition::kMultilingual))
        for (size_t l = 0; l < test_sets.size(); ++l)
          record(geo.train[l].language_id, BenchCondition::kMultilingual,
                 Evaluate(trained.model, test_sets[l], &seen));

      if (!wants(BenchCondition::kZeroShot) && !wants(BenchCondition::kFewShot)) continue;
      ExtensionOptions ext;
      ext.mode = head == HeadKind::kFlat ? cfg.flat_extension : ExtensionMode::kPhonology;
      ext.seed = SeedFor(seed, 3);
      const AcousticModel target = BuildTargetModel(trained.model, heldout.units, table, ext);
      if (wants(BenchCondition::kZeroShot))
        record(geo.heldout.language_id, BenchCondition::kZeroShot,
               Evaluate(target, heldout_test, &seen));
      if (wants(BenchCondition::kFewShot)) {
        TrainConfig fc = cfg.finetune;
        fc.seed = SeedFor(seed, 4);
        const TrainResult tuned = Finetune(target, heldout_ft, fc);
        record(geo.heldout.language_id, BenchCondition::kFewShot,
               Evaluate(tuned.model, heldout_test, &seen));
      }
    }
  }
  return records;
}

double MedianPer(std::span<const ReportRecord> records, const std::string &method,
                 BenchCondition condition, PerField field) {
  std::vector<double> v;
  for (const auto &r : records) {
    if (r.method != method || r.condition != BenchConditionName(condition)) continue;
    const double x = field == PerField::kOverall ? r.per
                     : field == PerField::kSeen  ? r.seen_per
                                                 : r.unseen_per;
    if (!std::isnan(x)) v.push_back(x);
  }
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace joinap
