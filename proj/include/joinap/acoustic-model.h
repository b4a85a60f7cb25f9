// joinap/acoustic-model.h

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

#ifndef JOINAP_ACOUSTIC_MODEL_H_
#define JOINAP_ACOUSTIC_MODEL_H_

#include <string>
#include <vector>

#include "joinap/acoustic-encoder.h"
#include "joinap/embedding-head.h"
#include "joinap/phono-features.h"

namespace joinap {

// Encoder + embedding head over a fixed unit list. `phono` holds the
// phonological vectors of `units` (row i <-> unit i) for every head kind, so
// flat models can still be exported and extended.
struct AcousticModel {
  std::vector<std::string> units;
  Matrix phono;  // N x 51
  EncoderParams encoder;
  EmbeddingHead head;

  Eigen::Index NumUnits() const { return static_cast<Eigen::Index>(units.size()); }
  HeadKind head_kind() const { return KindOf(head); }

  // Encoder parameters first, then head parameters.
  std::vector<ParamView> Params();
  uint64_t Checksum() const;

  Matrix Embeddings() const;
  Matrix ComputeLogits(const Matrix &frames) const;
};

AcousticModel InitModel(const std::vector<std::string> &units, const FeatureTable &table,
                        const EncoderConfig &encoder, HeadKind head, const HeadOptions &head_opts,
                        uint64_t seed);

struct TargetModelInfo {
  std::vector<std::string> seen;    // target phones known to the source model
  std::vector<std::string> unseen;  // target phones given new embeddings
};

// Re-targets the output layer to `target_units` (specials first). Seen units
// keep their embeddings; unseen phones are embedded through ExtendInventory:
// JoinAP heads only need the new phonological rows, flat heads receive random
// or mean-of-seen rows. The source model is not modified.
AcousticModel BuildTargetModel(const AcousticModel &source,
                               const std::vector<std::string> &target_units,
                               const FeatureTable &table, const ExtensionOptions &opts,
                               TargetModelInfo *info = nullptr);

}  // namespace joinap

#endif  // JOINAP_ACOUSTIC_MODEL_H_
