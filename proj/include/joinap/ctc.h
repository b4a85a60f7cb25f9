// joinap/ctc.h

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

#ifndef JOINAP_CTC_H_
#define JOINAP_CTC_H_

#include <limits>
#include <span>
#include <vector>

#include "joinap/common.h"

namespace joinap {

inline constexpr int kBlank = 0;
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double LogAdd(double a, double b);

// Label sequences are unit indices with no blanks; paths are one unit per
// frame, blanks allowed.
using LabelSequence = std::vector<int>;

// Merges consecutive repeats, then drops blanks. Throws kEmptyResult if
// nothing is left.
LabelSequence Collapse(std::span<const int> path);
// Same as Collapse but returns an empty sequence instead of throwing.
LabelSequence CollapseOrEmpty(std::span<const int> path);

// Frames needed to emit `labels`: L plus one separating blank per adjacent
// repeat.
int MinFramesForLabels(std::span<const int> labels);

struct CtcResult {
  double nll = 0.0;
  Matrix grad;       // dnll/dZ, T x N
  Matrix log_alpha;  // T x (2L+1)
  Matrix log_beta;   // T x (2L+1)
};

// -log p(l|x) with p(pi_t|x) = softmax(Z_t); exact gradient w.r.t. Z.
CtcResult CtcLoss(const Matrix &logits, std::span<const int> labels);

// Frame argmax (lowest index wins ties), then collapse.
LabelSequence GreedyDecode(const Matrix &logits);

// Validates a reference label sequence against an N-unit output layer.
void CheckLabels(std::span<const int> labels, Eigen::Index num_units);

}  // namespace joinap

#endif  // JOINAP_CTC_H_
