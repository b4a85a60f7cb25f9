// joinap/synth-corpus.h

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

#ifndef JOINAP_SYNTH_CORPUS_H_
#define JOINAP_SYNTH_CORPUS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "joinap/common.h"
#include "joinap/ctc.h"
#include "joinap/phono-features.h"

namespace joinap {

// Speech-like data whose frames are a linear function of phonology:
//   x = W p(phone) + o_L + noise,
// with W shared by every language and o_L a per-language offset. A phone that
// no training language uses still has a predictable prototype W p.
struct SynthLanguageSpec {
  std::string language_id;
  std::vector<std::string> inventory;
  int min_frames_per_phone = 2;
  int max_frames_per_phone = 4;
  double noise_std = 0.5;
  double language_offset_std = 0.3;
  int min_phones = 4;
  int max_phones = 8;
  int num_utterances = 100;
  uint64_t seed = 0;

  void Validate() const;
};

struct Utterance {
  std::string language_id;
  LabelSequence labels;  // indices into Corpus::units
  Matrix frames;         // T x D
};

struct Corpus {
  std::vector<std::string> units;  // unit symbol table; units[0] is <blk>
  std::vector<Utterance> utterances;

  Eigen::Index FrameDim() const;
};

// D x 51 standard Gaussian matrix.
Matrix MakeEmissionMap(int dim, uint64_t seed);

Vector PhonePrototype(const Matrix &emission, const FeatureTable &table,
                      const std::string &phone);

// Units of the returned corpus are [<blk>, <spn>, <nsn>] + spec.inventory.
Corpus GenerateLanguage(const SynthLanguageSpec &spec, const FeatureTable &table,
                        const Matrix &emission);

// Re-indexes labels into `units` by symbol. Throws kInventoryMismatch when a
// corpus unit that is actually used is missing from `units`.
Corpus RemapCorpus(const Corpus &corpus, const std::vector<std::string> &units);

// Concatenates corpora after remapping each into `units`.
Corpus MergeCorpora(std::span<const Corpus> corpora, const std::vector<std::string> &units);

// Binary container, little-endian:
//   "JAPC" u32 version(=1)
//   u32 num_units, then per unit: u32 byte length + UTF-8 bytes
//   u32 num_utterances, then per utterance:
//     u32 len + language id bytes
//     u32 L, L x i32 label indices
//     u32 T, u32 D, T*D x f64 frames (row-major)
void WriteCorpus(const std::string &path, const Corpus &corpus);
Corpus ReadCorpus(const std::string &path);

}  // namespace joinap

#endif  // JOINAP_SYNTH_CORPUS_H_
