// decode-eval.cc

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

#include "joinap/decode-eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "joinap/ctc.h"
#include "json.hpp"

namespace joinap {

EditCounts &EditCounts::operator+=(const EditCounts &o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  return *this;
}

namespace {

// (errors, insertions + deletions), compared lexicographically.
struct Cost {
  int errors;
  int indels;
  auto operator<=>(const Cost &) const = default;
};

}  // namespace

std::vector<AlignedPair> Align(std::span<const int> ref, std::span<const int> hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<Cost> dp((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> Cost & { return dp[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = {static_cast<int>(i), static_cast<int>(i)};
  for (size_t j = 0; j <= m; ++j) at(0, j) = {static_cast<int>(j), static_cast<int>(j)};
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      const Cost &d = at(i - 1, j - 1);
      Cost best{d.errors + (ref[i - 1] != hyp[j - 1] ? 1 : 0), d.indels};
      const Cost del{at(i - 1, j).errors + 1, at(i - 1, j).indels + 1};
      const Cost ins{at(i, j - 1).errors + 1, at(i, j - 1).indels + 1};
      best = std::min({best, del, ins});
      at(i, j) = best;
    }

  std::vector<AlignedPair> path;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const Cost cur = at(i, j);
    if (i > 0 && j > 0) {
      const Cost &d = at(i - 1, j - 1);
      if (Cost{d.errors + (ref[i - 1] != hyp[j - 1] ? 1 : 0), d.indels} == cur) {
        path.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1)});
        --i, --j;
        continue;
      }
    }
    if (i > 0 && Cost{at(i - 1, j).errors + 1, at(i - 1, j).indels + 1} == cur) {
      path.push_back({static_cast<int>(i - 1), -1});
      --i;
      continue;
    }
    path.push_back({-1, static_cast<int>(j - 1)});
    --j;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

EditCounts EditDistance(std::span<const int> ref, std::span<const int> hyp) {
  EditCounts c;
  for (const auto &p : Align(ref, hyp)) {
    if (p.ref < 0) ++c.insertions;
    else if (p.hyp < 0) ++c.deletions;
    else if (ref[p.ref] != hyp[p.hyp]) ++c.substitutions;
  }
  return c;
}

EvalResult Evaluate(const AcousticModel &model, const Corpus &corpus,
                    const std::set<std::string> *seen_phones) {
  const Corpus mapped = RemapCorpus(corpus, model.units);
  const Matrix embeddings = model.Embeddings();
  auto is_unseen = [&](int unit) {
    const std::string &sym = model.units[static_cast<size_t>(unit)];
    return seen_phones && !ParseSpecialSymbol(sym) && !seen_phones->count(sym);
  };

  EvalResult res;
  for (const auto &utt : mapped.utterances) {
    const Matrix hidden = EncoderForward(model.encoder, utt.frames, false, 0).hidden;
    const LabelSequence hyp = GreedyDecode(Logits(embeddings, hidden));
    EditCounts counts;
    for (const auto &p : Align(utt.labels, hyp)) {
      const std::string ref_sym = p.ref >= 0 ? model.units[utt.labels[p.ref]] : "<eps>";
      const std::string hyp_sym = p.hyp >= 0 ? model.units[hyp[p.hyp]] : "<eps>";
      ++res.confusion[{ref_sym, hyp_sym}];
      const bool error = p.ref < 0 || p.hyp < 0 || utt.labels[p.ref] != hyp[p.hyp];
      if (p.ref < 0) ++counts.insertions;
      else if (p.hyp < 0) ++counts.deletions;
      else if (error) ++counts.substitutions;
      const int charged = p.ref >= 0 ? utt.labels[p.ref] : hyp[p.hyp];
      const bool unseen = is_unseen(charged);
      if (p.ref >= 0) ++(unseen ? res.unseen_ref_length : res.seen_ref_length);
      if (error) ++(unseen ? res.unseen_errors : res.seen_errors);
    }
    res.total += counts;
    res.per_utterance.push_back(counts);
    res.ref_length += static_cast<long>(utt.labels.size());
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.per = res.ref_length ? static_cast<double>(res.total.Errors()) / res.ref_length : nan;
  res.seen_per = res.seen_ref_length
                     ? static_cast<double>(res.seen_errors) / res.seen_ref_length
                     : nan;
  res.unseen_per = res.unseen_ref_length
                       ? static_cast<double>(res.unseen_errors) / res.unseen_ref_length
                       : nan;
  return res;
}

double PhoneErrorRate(const AcousticModel &model, std::span<const Utterance> utterances) {
  const Matrix embeddings = model.Embeddings();
  long errors = 0, ref_len = 0;
  for (const auto &utt : utterances) {
    const Matrix hidden = EncoderForward(model.encoder, utt.frames, false, 0).hidden;
    errors += EditDistance(utt.labels, GreedyDecode(Logits(embeddings, hidden))).Errors();
    ref_len += static_cast<long>(utt.labels.size());
  }
  return ref_len ? static_cast<double>(errors) / ref_len : 0.0;
}

std::string ReportRecord::ToJsonLine() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["language"] = language;
  j["condition"] = condition;
  j["seed"] = seed;
  j["PER"] = per;
  j["seen_PER"] = seen_per;
  j["unseen_PER"] = unseen_per;
  return j.dump();
}

ReportRecord ReportRecord::FromJsonLine(const std::string &line) {
  try {
    const auto j = nlohmann::json::parse(line);
    auto num = [&](const char *key) {
      return j.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN()
                                 : j.at(key).get<double>();
    };
    ReportRecord r;
    r.method = j.at("method").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.condition = j.at("condition").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.per = num("PER");
    r.seen_per = num("seen_PER");
    r.unseen_per = num("unseen_PER");
    return r;
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kCorruptFile, std::string("report record: ") + e.what());
  }
}

void WriteReport(std::ostream &os, std::span<const ReportRecord> records) {
  for (const auto &r : records) os << r.ToJsonLine() << '\n';
  if (!os) Fail(ErrorCode::kIoFailure, "report write failed");
}

std::vector<ReportRecord> ReadReport(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  std::vector<ReportRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(ReportRecord::FromJsonLine(line));
  return out;
}

void ExportEmbeddings(const EmbeddingHead &head, const Matrix &phono,
                      const std::vector<std::string> &units, const std::string &path) {
  const Matrix e = ComputeEmbeddings(head, phono).embeddings;
  if (e.rows() != static_cast<Eigen::Index>(units.size()))
    Fail(ErrorCode::kDimensionMismatch, "embedding rows do not match the unit list");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    os << units[static_cast<size_t>(i)];
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", e(i, c));
      os << ',' << buf;
    }
    os << '\n';
  }
  os.flush();
  if (!os) Fail(ErrorCode::kIoFailure, "write failed for " + path);
}

}  // namespace joinap
