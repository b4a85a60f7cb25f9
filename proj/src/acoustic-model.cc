// acoustic-model.cc

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

#include "joinap/acoustic-model.h"

#include <random>
#include <unordered_map>

namespace joinap {

std::vector<ParamView> AcousticModel::Params() {
  std::vector<ParamView> v = encoder.Params();
  for (auto &p : HeadParams(head)) v.push_back(p);
  return v;
}

uint64_t AcousticModel::Checksum() const {
  auto views = const_cast<AcousticModel *>(this)->Params();
  return ChecksumParams(views);
}

Matrix AcousticModel::Embeddings() const { return ComputeEmbeddings(head, phono).embeddings; }

Matrix AcousticModel::ComputeLogits(const Matrix &frames) const {
  const Matrix hidden = EncoderForward(encoder, frames, false, 0).hidden;
  return Logits(Embeddings(), hidden);
}

AcousticModel InitModel(const std::vector<std::string> &units, const FeatureTable &table,
                        const EncoderConfig &encoder, HeadKind head, const HeadOptions &head_opts,
                        uint64_t seed) {
  if (units.size() < 2 || units.front() != SpecialSymbol(SpecialToken::kBlank))
    Fail(ErrorCode::kInvalidConfig, "unit list must start with <blk> and have >= 2 units");
  std::mt19937_64 rng(seed);
  AcousticModel m;
  m.units = units;
  m.phono = EncodeUnits(table, units);
  m.encoder = EncoderParams::Init(encoder, rng);
  m.head = InitHead(head, m.NumUnits(), encoder.output_dim, head_opts, rng);
  return m;
}

AcousticModel BuildTargetModel(const AcousticModel &source,
                               const std::vector<std::string> &target_units,
                               const FeatureTable &table, const ExtensionOptions &opts,
                               TargetModelInfo *info) {
  if (target_units.size() < 2 || target_units.front() != SpecialSymbol(SpecialToken::kBlank))
    Fail(ErrorCode::kInvalidConfig, "target unit list must start with <blk>");
  std::unordered_map<std::string, int> source_index;
  for (size_t i = 0; i < source.units.size(); ++i)
    source_index.emplace(source.units[i], static_cast<int>(i));

  TargetModelInfo local;
  std::vector<int> unseen_rows;
  for (size_t i = 0; i < target_units.size(); ++i) {
    const auto &u = target_units[i];
    if (ParseSpecialSymbol(u)) {
      if (!source_index.count(u))
        Fail(ErrorCode::kInventoryMismatch, "source model lacks special unit " + u);
      continue;
    }
    if (source_index.count(u)) {
      local.seen.push_back(u);
    } else {
      local.unseen.push_back(u);
      unseen_rows.push_back(static_cast<int>(i));
    }
  }

  AcousticModel target;
  target.units = target_units;
  target.phono = EncodeUnits(table, target_units);
  target.encoder = source.encoder;
  target.head = source.head;

  if (source.head_kind() == HeadKind::kFlat) {
    const Matrix &table_rows = std::get<FlatHead>(source.head).table;
    Matrix new_phono(static_cast<Eigen::Index>(unseen_rows.size()), kPhonoDim);
    for (size_t j = 0; j < unseen_rows.size(); ++j)
      new_phono.row(static_cast<Eigen::Index>(j)) = target.phono.row(unseen_rows[j]);
    ExtensionOptions ext = opts;
    if (ext.mode == ExtensionMode::kMeanOfSeen && ext.seen_rows.empty())
      for (int r = kNumSpecials; r < source.NumUnits(); ++r) ext.seen_rows.push_back(r);
    const Matrix extra = ExtendInventory(source.head, new_phono, ext);
    Matrix rows(target.NumUnits(), table_rows.cols());
    size_t next_unseen = 0;
    for (Eigen::Index i = 0; i < target.NumUnits(); ++i) {
      auto it = source_index.find(target_units[static_cast<size_t>(i)]);
      if (it != source_index.end()) {
        rows.row(i) = table_rows.row(it->second);
      } else {
        rows.row(i) = extra.row(static_cast<Eigen::Index>(next_unseen++));
      }
    }
    std::get<FlatHead>(target.head).table = std::move(rows);
  } else if (opts.mode != ExtensionMode::kPhonology) {
    Fail(ErrorCode::kModeHeadMismatch, "JoinAP heads extend through phonology only");
  }
  if (info) *info = std::move(local);
  return target;
}

}  // namespace joinap
