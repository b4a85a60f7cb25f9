// joinap/benchmark.h

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

#ifndef JOINAP_BENCHMARK_H_
#define JOINAP_BENCHMARK_H_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "joinap/decode-eval.h"
#include "joinap/phone-inventory.h"
#include "joinap/trainer.h"

namespace joinap {

// The default synthetic cross-lingual setup: a few training languages that
// share a core of phones and each add their own extras, and one held-out
// language that reuses part of the core and of the extras and adds phones no
// training language has.
struct BenchmarkConfig {
  int num_train_languages = 4;
  int core_size = 18;
  int extra_pool = 28;
  int extras_per_language = 12;
  int heldout_core = 12;
  int heldout_seen_extras = 8;
  int heldout_unseen = 10;

  int frame_dim = 24;
  double noise_std = 0.5;
  double language_offset_std = 0.3;
  int min_frames_per_phone = 2;
  int max_frames_per_phone = 4;
  int min_phones = 4;
  int max_phones = 8;

  int train_utterances = 150;  // per training language
  int test_utterances = 40;    // per training language (multilingual test)
  int heldout_utterances = 400;
  double heldout_test_fraction = 0.25;
  double finetune_fraction = 0.05;  // of all held-out utterances

  TrainConfig train;
  TrainConfig finetune;
  ExtensionMode flat_extension = ExtensionMode::kRandom;

  BenchmarkConfig();
  void Validate() const;
};

struct BenchmarkGeometry {
  std::vector<LanguageInventory> train;
  LanguageInventory heldout;
  std::vector<std::string> unseen;  // held-out phones absent from training
};

BenchmarkGeometry SampleGeometry(const FeatureTable &table, const BenchmarkConfig &cfg,
                                 uint64_t seed);

enum class BenchCondition { kMultilingual, kZeroShot, kFewShot };
std::string_view BenchConditionName(BenchCondition c);  // multilingual | zero_shot | few_shot

// "flat", "joinap-linear", "joinap-nonlinear".
std::string MethodName(HeadKind head);

struct BenchmarkRequest {
  std::vector<HeadKind> heads = {HeadKind::kFlat, HeadKind::kLinear, HeadKind::kNonlinear};
  std::vector<uint64_t> seeds = {1};
  std::vector<BenchCondition> conditions = {BenchCondition::kZeroShot};
};

// One multilingual training run per (seed, head); every requested condition
// is evaluated from it. Records are ordered by seed, head, condition. The
// optional callback receives progress lines.
std::vector<ReportRecord> RunBenchmark(const FeatureTable &table, const BenchmarkConfig &cfg,
                                       const BenchmarkRequest &request,
                                       const std::function<void(const std::string &)> &log = {});

// Median over the records matching (method, condition) of the chosen field.
enum class PerField { kOverall, kSeen, kUnseen };
double MedianPer(std::span<const ReportRecord> records, const std::string &method,
                 BenchCondition condition, PerField field);

}  // namespace joinap

#endif  // JOINAP_BENCHMARK_H_
