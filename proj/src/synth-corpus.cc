// synth-corpus.cc

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

#include "joinap/synth-corpus.h"

#include <fstream>
#include <random>
#include <unordered_map>

namespace joinap {

void SynthLanguageSpec::Validate() const {
  if (min_frames_per_phone < 1 || max_frames_per_phone < min_frames_per_phone)
    Fail(ErrorCode::kInvalidConfig, "need 1 <= d_min <= d_max");
  if (noise_std < 0.0 || language_offset_std < 0.0)
    Fail(ErrorCode::kInvalidConfig, "noise and offset std must be >= 0");
  if (min_phones < 1 || max_phones < min_phones)
    Fail(ErrorCode::kInvalidConfig, "need 1 <= min_phones <= max_phones");
  if (num_utterances < 0) Fail(ErrorCode::kInvalidConfig, "num_utterances must be >= 0");
  if (inventory.empty()) Fail(ErrorCode::kInvalidConfig, "empty inventory");
}

Eigen::Index Corpus::FrameDim() const {
  return utterances.empty() ? 0 : utterances.front().frames.cols();
}

Matrix MakeEmissionMap(int dim, uint64_t seed) {
  if (dim < 1) Fail(ErrorCode::kInvalidConfig, "emission dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix w(dim, kPhonoDim);
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = normal(rng);
  return w;
}

Vector PhonePrototype(const Matrix &emission, const FeatureTable &table,
                      const std::string &phone) {
  return emission * EncodePhone(table, phone).ToRow().transpose();
}

Corpus GenerateLanguage(const SynthLanguageSpec &spec, const FeatureTable &table,
                        const Matrix &emission) {
  spec.Validate();
  std::vector<Vector> prototypes;
  for (const auto &p : spec.inventory) prototypes.push_back(PhonePrototype(emission, table, p));

  Corpus corpus;
  for (SpecialToken t : kAllSpecials) corpus.units.emplace_back(SpecialSymbol(t));
  corpus.units.insert(corpus.units.end(), spec.inventory.begin(), spec.inventory.end());

  const Eigen::Index dim = emission.rows();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector offset(dim);
  for (Eigen::Index d = 0; d < dim; ++d) offset(d) = spec.language_offset_std * normal(rng);

  std::uniform_int_distribution<int> pick_len(spec.min_phones, spec.max_phones);
  std::uniform_int_distribution<int> pick_phone(0, static_cast<int>(spec.inventory.size()) - 1);
  std::uniform_int_distribution<int> pick_dur(spec.min_frames_per_phone, spec.max_frames_per_phone);
  for (int n = 0; n < spec.num_utterances; ++n) {
    Utterance utt;
    utt.language_id = spec.language_id;
    const int len = pick_len(rng);
    std::vector<int> durations;
    int total = 0;
    for (int i = 0; i < len; ++i) {
      const int p = pick_phone(rng);
      utt.labels.push_back(kNumSpecials + p);
      durations.push_back(pick_dur(rng));
      total += durations.back();
    }
    utt.frames.resize(total, dim);
    int t = 0;
    for (int i = 0; i < len; ++i) {
      const Vector &mu = prototypes[utt.labels[i] - kNumSpecials];
      for (int f = 0; f < durations[i]; ++f, ++t)
        for (Eigen::Index d = 0; d < dim; ++d)
          utt.frames(t, d) = mu(d) + offset(d) + spec.noise_std * normal(rng);
    }
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

Corpus RemapCorpus(const Corpus &corpus, const std::vector<std::string> &units) {
  std::unordered_map<std::string, int> index;
  for (size_t i = 0; i < units.size(); ++i) index.emplace(units[i], static_cast<int>(i));
  std::vector<int> map(corpus.units.size(), -1);
  for (size_t i = 0; i < corpus.units.size(); ++i) {
    auto it = index.find(corpus.units[i]);
    if (it != index.end()) map[i] = it->second;
  }
  Corpus out;
  out.units = units;
  out.utterances.reserve(corpus.utterances.size());
  for (const auto &utt : corpus.utterances) {
    Utterance u{utt.language_id, {}, utt.frames};
    for (int l : utt.labels) {
      if (l < 0 || l >= static_cast<int>(map.size()))
        Fail(ErrorCode::kCorruptFile, "label index outside the corpus unit table");
      if (map[l] < 0)
        Fail(ErrorCode::kInventoryMismatch, "unit '" + corpus.units[l] + "' not in target inventory");
      u.labels.push_back(map[l]);
    }
    out.utterances.push_back(std::move(u));
  }
  return out;
}

Corpus MergeCorpora(std::span<const Corpus> corpora, const std::vector<std::string> &units) {
  Corpus out;
  out.units = units;
  for (const auto &c : corpora) {
    Corpus r = RemapCorpus(c, units);
    for (auto &u : r.utterances) out.utterances.push_back(std::move(u));
  }
  return out;
}

void WriteCorpus(const std::string &path, const Corpus &corpus) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write " + path);
  os.write("JAPC", 4);
  binio::WriteU32(os, 1);
  binio::WriteU32(os, static_cast<uint32_t>(corpus.units.size()));
  for (const auto &u : corpus.units) binio::WriteString(os, u);
  binio::WriteU32(os, static_cast<uint32_t>(corpus.utterances.size()));
  for (const auto &utt : corpus.utterances) {
    binio::WriteString(os, utt.language_id);
    binio::WriteU32(os, static_cast<uint32_t>(utt.labels.size()));
    for (int l : utt.labels) binio::WriteI32(os, l);
    binio::WriteMatrix(os, utt.frames);
  }
  os.flush();
  if (!os) Fail(ErrorCode::kIoFailure, "write failed for " + path);
}

Corpus ReadCorpus(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "JAPC") Fail(ErrorCode::kCorruptFile, path + ": bad magic");
  if (binio::ReadU32(is) != 1) Fail(ErrorCode::kCorruptFile, path + ": unsupported version");
  Corpus c;
  const uint32_t num_units = binio::ReadU32(is);
  for (uint32_t i = 0; i < num_units; ++i) c.units.push_back(binio::ReadString(is));
  const uint32_t num_utts = binio::ReadU32(is);
  for (uint32_t n = 0; n < num_utts; ++n) {
    Utterance utt;
    utt.language_id = binio::ReadString(is);
    const uint32_t len = binio::ReadU32(is);
    for (uint32_t i = 0; i < len; ++i) {
      const int32_t l = binio::ReadI32(is);
      if (l < 0 || static_cast<uint32_t>(l) >= num_units)
        Fail(ErrorCode::kCorruptFile, path + ": label index out of range");
      utt.labels.push_back(l);
    }
    utt.frames = binio::ReadMatrix(is);
    c.utterances.push_back(std::move(utt));
  }
  return c;
}

}  // namespace joinap
