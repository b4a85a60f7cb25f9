// joinap/trainer.h

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

#ifndef JOINAP_TRAINER_H_
#define JOINAP_TRAINER_H_

#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "joinap/acoustic-model.h"
#include "joinap/ctc-crf.h"
#include "joinap/phone-inventory.h"
#include "joinap/synth-corpus.h"

namespace joinap {

enum class LossKind { kCtc, kCtcCrf };

std::string_view LossKindName(LossKind kind);  // "ctc" | "ctc-crf"
LossKind ParseLossKind(std::string_view name);

struct TrainConfig {
  LossKind loss = LossKind::kCtc;
  HeadKind head = HeadKind::kNonlinear;
  HeadOptions head_options;
  EncoderConfig encoder;

  double initial_lr = 1e-3;
  double plateau_factor = 0.1;
  double lr_floor = 1e-5;
  int patience = 2;
  double min_improvement = 1e-4;
  int batch_size = 8;
  int max_epochs = 20;
  uint64_t seed = 0;
  double clip_norm = 5.0;
  double dev_fraction = 0.1;

  // "encoder", "head", or exact parameter names such as "head.weight".
  std::set<std::string> freeze;

  int lm_order = 2;
  double lm_smoothing = 1.0;

  bool deterministic = false;
  int num_threads = 1;

  void Validate() const;
  bool IsFrozen(const std::string &param_name) const;
  std::string ToJson() const;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  uint64_t step = 0;
  std::vector<Vector> m;
  std::vector<Vector> v;
};

// Bias-corrected Adam on every view whose `active` flag is set (all when
// `active` is empty). Moments are created on first use. Throws
// kShapeMismatch if views, grads and moments disagree.
void AdamStep(std::span<const ParamView> params, std::span<const Matrix> grads,
              AdamState &state, double lr, const std::vector<bool> &active = {});

struct LossAndGradient {
  double nll = 0.0;
  std::vector<Matrix> grads;  // AcousticModel::Params() order
};

// Loss of one utterance and its gradient w.r.t. every model parameter.
// `graph` must be set for kCtcCrf (it may carry no LM, which is plain CTC).
LossAndGradient UtteranceLoss(const AcousticModel &model, const Matrix &embeddings,
                              const Utterance &utt, LossKind loss,
                              const DenominatorGraph *graph, bool train_mode,
                              uint64_t dropout_seed);

// Forward-only loss, eval mode.
double UtteranceNll(const AcousticModel &model, const Matrix &embeddings, const Utterance &utt,
                    LossKind loss, const DenominatorGraph *graph);

struct EpochRecord {
  int epoch = 0;  // 0 = the untouched initial model
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_per = 0.0;
  double lr = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  uint64_t checksum = 0;
  int skipped = 0;  // utterances too short for their label sequence
  std::vector<std::string> frozen;
  std::string stop_reason;

  // One JSON object per epoch, then a summary object.
  void Write(std::ostream &os) const;
};

struct TrainResult {
  AcousticModel model;
  TrainReport report;
  AdamState adam;
};

// Trains a fresh model over set.Units() on the union of `corpora`. `phono`
// holds the phonological vectors of the units.
TrainResult TrainMultilingual(std::span<const Corpus> corpora, const UniversalPhoneSet &set,
                              const Matrix &phono, const TrainConfig &config);

// Continues training `model` on `corpus` only (labels are mapped into the
// model units by symbol). config.head and config.encoder are ignored; with
// max_epochs == 0 the model is returned unchanged.
TrainResult Finetune(const AcousticModel &model, const Corpus &corpus, const TrainConfig &config);

// Trains `model` in place on already-mapped utterances. Shared by the two
// entry points above.
TrainResult RunTraining(AcousticModel model, std::vector<Utterance> utterances,
                        const TrainConfig &config);

struct Checkpoint {
  std::string config_json;
  AcousticModel model;
  AdamState adam;
  int epoch = 0;
};

// Binary container, little-endian:
//   "JAPK" u32 version(=1)
//   string config json
//   u32 N, N strings (units); matrix P
//   encoder config: i32 input_dim, i32 context, u32 n + n i32 hidden widths,
//     i32 output_dim, u32 activation, u32 recurrent, f64 dropout
//   u32 head kind, u32 head activation
//   u32 B parameter blocks: string name + matrix (true shape)
//   adam: u64 step, f64 beta1, beta2, eps, u32 K, K x (matrix m, matrix v)
//   u32 epoch
// Strings are u32 length + bytes; matrices are u32 rows, u32 cols and
// row-major f64 data.
void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace joinap

#endif  // JOINAP_TRAINER_H_
