// ctc.cc

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

#include "joinap/ctc.h"

#include <cmath>
#include <string>

#include "joinap/embedding-head.h"

namespace joinap {

double LogAdd(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

LabelSequence CollapseOrEmpty(std::span<const int> path) {
  LabelSequence out;
  int prev = -1;
  for (int u : path) {
    if (u != prev && u != kBlank) out.push_back(u);
    prev = u;
  }
  return out;
}

LabelSequence Collapse(std::span<const int> path) {
  LabelSequence out = CollapseOrEmpty(path);
  if (out.empty()) Fail(ErrorCode::kEmptyResult, "path collapses to the empty sequence");
  return out;
}

int MinFramesForLabels(std::span<const int> labels) {
  int n = static_cast<int>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

void CheckLabels(std::span<const int> labels, Eigen::Index num_units) {
  if (labels.empty()) Fail(ErrorCode::kDimensionMismatch, "label sequence is empty");
  for (int u : labels)
    if (u <= kBlank || u >= num_units)
      Fail(ErrorCode::kDimensionMismatch,
           "label " + std::to_string(u) + " outside [1, " + std::to_string(num_units) + ")");
}

CtcResult CtcLoss(const Matrix &logits, std::span<const int> labels) {
  const Eigen::Index num_frames = logits.rows(), num_units = logits.cols();
  if (num_units < 2) Fail(ErrorCode::kDimensionMismatch, "CTC needs at least 2 units");
  CheckLabels(labels, num_units);
  if (num_frames < MinFramesForLabels(labels))
    Fail(ErrorCode::kInfeasibleLength,
         std::to_string(num_frames) + " frames cannot emit " + std::to_string(labels.size()) +
             " labels");
  const Matrix logp = LogPosteriors(logits);

  const int num_states = 2 * static_cast<int>(labels.size()) + 1;
  std::vector<int> ext(num_states, kBlank);
  for (size_t i = 0; i < labels.size(); ++i) ext[2 * i + 1] = labels[i];
  auto can_skip = [&](int s) { return s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2]; };

  CtcResult res;
  Matrix &alpha = res.log_alpha;
  Matrix &beta = res.log_beta;
  alpha = Matrix::Constant(num_frames, num_states, kLogZero);
  beta = Matrix::Constant(num_frames, num_states, kLogZero);

  alpha(0, 0) = logp(0, ext[0]);
  if (num_states > 1) alpha(0, 1) = logp(0, ext[1]);
  for (Eigen::Index t = 1; t < num_frames; ++t) {
    for (int s = 0; s < num_states; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = LogAdd(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = LogAdd(a, alpha(t - 1, s - 2));
      if (a != kLogZero) alpha(t, s) = a + logp(t, ext[s]);
    }
  }

  const Eigen::Index last = num_frames - 1;
  beta(last, num_states - 1) = logp(last, ext[num_states - 1]);
  if (num_states > 1) beta(last, num_states - 2) = logp(last, ext[num_states - 2]);
  for (Eigen::Index t = last - 1; t >= 0; --t) {
    for (int s = 0; s < num_states; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < num_states) b = LogAdd(b, beta(t + 1, s + 1));
      if (s + 2 < num_states && can_skip(s + 2)) b = LogAdd(b, beta(t + 1, s + 2));
      if (b != kLogZero) beta(t, s) = b + logp(t, ext[s]);
    }
  }

  double log_like = alpha(last, num_states - 1);
  if (num_states > 1) log_like = LogAdd(log_like, alpha(last, num_states - 2));
  if (!std::isfinite(log_like))
    Fail(ErrorCode::kNonFiniteInput, "label sequence has zero probability");
  res.nll = -log_like;

  // dnll/dz_{t,k} = y_{t,k} - (1/p) sum_{s: ext[s]=k} alpha_t(s) beta_t(s) / y_{t,k}
  res.grad = logp.array().exp().matrix();
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    for (int s = 0; s < num_states; ++s) {
      const double lg = alpha(t, s) + beta(t, s);
      if (lg == kLogZero) continue;
      res.grad(t, ext[s]) -= std::exp(lg - logp(t, ext[s]) - log_like);
    }
  }
  return res;
}

LabelSequence GreedyDecode(const Matrix &logits) {
  std::vector<int> path(static_cast<size_t>(logits.rows()));
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < logits.cols(); ++k)
      if (logits(t, k) > logits(t, best)) best = k;
    path[static_cast<size_t>(t)] = static_cast<int>(best);
  }
  return CollapseOrEmpty(path);
}

}  // namespace joinap
