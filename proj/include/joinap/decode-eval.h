// joinap/decode-eval.h

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

#ifndef JOINAP_DECODE_EVAL_H_
#define JOINAP_DECODE_EVAL_H_

#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "joinap/acoustic-model.h"
#include "joinap/synth-corpus.h"

namespace joinap {

struct EditCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;

  int Errors() const { return substitutions + insertions + deletions; }
  EditCounts &operator+=(const EditCounts &o);
  bool operator==(const EditCounts &o) const = default;
};

struct AlignedPair {
  int ref = -1;  // -1 for an insertion
  int hyp = -1;  // -1 for a deletion
};

// Minimum unit-cost Levenshtein alignment. Among equal-cost alignments the
// one with the most substitutions (fewest insertions + deletions) wins.
std::vector<AlignedPair> Align(std::span<const int> ref, std::span<const int> hyp);
EditCounts EditDistance(std::span<const int> ref, std::span<const int> hyp);

struct EvalResult {
  std::vector<EditCounts> per_utterance;
  EditCounts total;
  long ref_length = 0;
  double per = 0.0;
  // (reference symbol, hypothesis symbol); "<eps>" marks ins/del.
  std::map<std::pair<std::string, std::string>, int> confusion;
  long seen_ref_length = 0;
  long unseen_ref_length = 0;
  long seen_errors = 0;
  long unseen_errors = 0;
  double seen_per = 0.0;    // NaN when no seen references
  double unseen_per = 0.0;  // NaN when no unseen references
};

// Greedy-decodes every utterance. Substitutions and deletions are charged to
// the reference phone, insertions to the inserted phone; a phone is unseen
// when `seen_phones` is given and does not contain it. Corpus labels are
// mapped into the model units by symbol (kInventoryMismatch otherwise).
EvalResult Evaluate(const AcousticModel &model, const Corpus &corpus,
                    const std::set<std::string> *seen_phones = nullptr);

// PER of an already-remapped set of utterances; used for dev monitoring.
double PhoneErrorRate(const AcousticModel &model, std::span<const Utterance> utterances);

struct ReportRecord {
  std::string method;
  std::string language;
  std::string condition;  // multilingual | zero_shot | few_shot
  uint64_t seed = 0;
  double per = 0.0;
  double seen_per = 0.0;
  double unseen_per = 0.0;

  // One JSON object: method, language, condition, seed, PER, seen_PER,
  // unseen_PER (NaN is written as null).
  std::string ToJsonLine() const;
  static ReportRecord FromJsonLine(const std::string &line);
};

void WriteReport(std::ostream &os, std::span<const ReportRecord> records);
std::vector<ReportRecord> ReadReport(const std::string &path);

// `symbol,e_1,...,e_H` per unit, %.17g.
void ExportEmbeddings(const EmbeddingHead &head, const Matrix &phono,
                      const std::vector<std::string> &units, const std::string &path);

}  // namespace joinap

#endif  // JOINAP_DECODE_EVAL_H_
