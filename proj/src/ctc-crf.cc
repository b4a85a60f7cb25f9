// ctc-crf.cc

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

#include "joinap/ctc-crf.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "joinap/embedding-head.h"

namespace joinap {

namespace {

double SafeLog(double x) { return x > 0.0 ? std::log(x) : kLogZero; }

}  // namespace

PhoneLm PhoneLm::Train(std::span<const LabelSequence> corpus, int order, double smoothing,
                       int vocab_size) {
  if (corpus.empty()) Fail(ErrorCode::kEmptyCorpus, "cannot train a phone LM on nothing");
  if (order != 1 && order != 2) Fail(ErrorCode::kInvalidConfig, "LM order must be 1 or 2");
  if (smoothing < 0.0) Fail(ErrorCode::kInvalidConfig, "smoothing must be >= 0");
  if (vocab_size < 1) Fail(ErrorCode::kInvalidConfig, "vocab size must be >= 1");

  PhoneLm lm;
  lm.order_ = order;
  lm.vocab_size_ = vocab_size;
  lm.smoothing_ = smoothing;
  const int num_contexts = order == 2 ? vocab_size + 1 : 1;

  Matrix token_counts = Matrix::Zero(num_contexts, vocab_size);
  std::vector<double> stop_counts(num_contexts, 0.0);
  double total_tokens = 0.0, total_stops = 0.0;
  for (const auto &seq : corpus) {
    int ctx = 0;
    for (int u : seq) {
      if (u < 1 || u > vocab_size)
        Fail(ErrorCode::kDimensionMismatch,
             "LM label " + std::to_string(u) + " outside [1, " + std::to_string(vocab_size) + "]");
      token_counts(ctx, u - 1) += 1.0;
      total_tokens += 1.0;
      ctx = lm.ContextAfter(u);
    }
    stop_counts[ctx] += 1.0;
    total_stops += 1.0;
  }

  const double global_stop = total_stops / (total_tokens + total_stops);
  const double k = smoothing;
  lm.log_token_.resize(num_contexts, vocab_size);
  lm.log_stop_.resize(num_contexts);
  lm.log_continue_.resize(num_contexts);
  for (int c = 0; c < num_contexts; ++c) {
    const double row_total = token_counts.row(c).sum();
    const double denom = row_total + k * vocab_size;
    for (int u = 0; u < vocab_size; ++u)
      lm.log_token_(c, u) = denom > 0.0 ? SafeLog((token_counts(c, u) + k) / denom)
                                        : -std::log(static_cast<double>(vocab_size));
    const double events = row_total + stop_counts[c] + 2.0 * k;
    const double q = events > 0.0 ? (stop_counts[c] + k) / events : global_stop;
    lm.log_stop_[c] = SafeLog(q);
    lm.log_continue_[c] = SafeLog(1.0 - q);
  }
  return lm;
}

double PhoneLm::LogTokenProb(int label, int context) const {
  return log_token_(context, label - 1);
}

double PhoneLm::LogEmitWeight(int label, int context) const {
  return log_continue_[context] + log_token_(context, label - 1);
}

double PhoneLm::SequenceLogProb(std::span<const int> labels) const {
  double lp = 0.0;
  int ctx = 0;
  for (int u : labels) {
    if (u < 1 || u > vocab_size_) Fail(ErrorCode::kDimensionMismatch, "label outside LM vocab");
    lp += LogEmitWeight(u, ctx);
    ctx = ContextAfter(u);
  }
  return lp + log_stop_[ctx];
}

DenominatorGraph::DenominatorGraph(int num_units, const PhoneLm *lm)
    : num_units_(num_units), vocab_(num_units - 1) {
  if (num_units < 2) Fail(ErrorCode::kDimensionMismatch, "denominator needs >= 2 units");
  emit_ = Matrix::Ones(vocab_ + 1, vocab_);
  stop_ = Vector::Ones(vocab_ + 1);
  if (lm) {
    if (lm->vocab_size() != vocab_)
      Fail(ErrorCode::kDimensionMismatch,
           "LM vocab " + std::to_string(lm->vocab_size()) + " vs " + std::to_string(vocab_) +
               " labels");
    lm_ = *lm;
    for (int u = 0; u <= vocab_; ++u) {
      const int ctx = u == 0 ? 0 : lm->ContextAfter(u);
      for (int k = 1; k <= vocab_; ++k) emit_(u, k - 1) = std::exp(lm->LogEmitWeight(k, ctx));
      stop_(u) = std::exp(lm->LogStopProb(ctx));
    }
  }
}

std::vector<DenominatorGraph::Arc> DenominatorGraph::Arcs() const {
  std::vector<Arc> arcs;
  auto blank_state = [](int u) { return u; };
  auto label_state = [this](int u) { return vocab_ + u; };
  for (int u = 0; u <= vocab_; ++u) {
    // from the blank-state u
    arcs.push_back({blank_state(u), blank_state(u), kBlank, 0.0});
    for (int k = 1; k <= vocab_; ++k)
      arcs.push_back({blank_state(u), label_state(k), k, SafeLog(emit_(u, k - 1))});
    if (u == 0) continue;
    // from the label-state u
    arcs.push_back({label_state(u), blank_state(u), kBlank, 0.0});
    arcs.push_back({label_state(u), label_state(u), u, 0.0});
    for (int k = 1; k <= vocab_; ++k)
      if (k != u) arcs.push_back({label_state(u), label_state(k), k, SafeLog(emit_(u, k - 1))});
  }
  return arcs;
}

double DenominatorGraph::LogFinalWeight(int state) const {
  const int u = state <= vocab_ ? state : state - vocab_;
  return SafeLog(stop_(u));
}

double DenominatorGraph::LogLabelProb(std::span<const int> labels) const {
  return lm_ ? lm_->SequenceLogProb(labels) : 0.0;
}

DenominatorGraph::ForwardBackward DenominatorGraph::Run(const Matrix &posteriors) const {
  const Eigen::Index num_frames = posteriors.rows();
  if (posteriors.cols() != num_units_)
    Fail(ErrorCode::kDimensionMismatch, "posterior width does not match the graph");
  if (num_frames < 1) Fail(ErrorCode::kDimensionMismatch, "need at least one frame");
  const int v = vocab_;
  const Vector emit_diag = emit_.bottomRows(v).diagonal();

  // Blank-states occupy entries 0..V of a (V+1)-vector; label-states use
  // entries 1..V of a second one (entry 0 stays zero).
  std::vector<Vector> alpha_blank(num_frames), alpha_label(num_frames);
  double log_scale = 0.0;
  Vector blank = Vector::Zero(v + 1), label = Vector::Zero(v + 1);
  blank(0) = 1.0;
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    const Vector y = posteriors.row(t).transpose();
    const Vector total = blank + label;
    Vector next_blank = y(0) * total;
    Vector next_label = Vector::Zero(v + 1);
    const Vector fresh = emit_.transpose() * total;  // V
    for (int k = 1; k <= v; ++k)
      next_label(k) = y(k) * (label(k) * (1.0 - emit_diag(k - 1)) + fresh(k - 1));
    const double z = next_blank.sum() + next_label.sum();
    if (!(z > 0.0) || !std::isfinite(z))
      Fail(ErrorCode::kNonFiniteInput, "denominator forward underflowed");
    log_scale += std::log(z);
    blank = next_blank / z;
    label = next_label / z;
    alpha_blank[t] = blank;
    alpha_label[t] = label;
  }

  ForwardBackward out;
  Vector final_label = stop_;
  final_label(0) = 0.0;
  out.log_total = log_scale + std::log(blank.dot(stop_) + label.dot(final_label));

  Vector beta_blank = stop_, beta_label = final_label;
  out.occupancy.resize(num_frames, num_units_);
  for (Eigen::Index t = num_frames - 1; t >= 0; --t) {
    Eigen::RowVectorXd occ(num_units_);
    occ(0) = alpha_blank[t].dot(beta_blank);
    for (int k = 1; k <= v; ++k) occ(k) = alpha_label[t](k) * beta_label(k);
    out.occupancy.row(t) = occ / occ.sum();
    if (t == 0) break;

    const Vector y = posteriors.row(t).transpose();
    Vector g(v);
    for (int k = 1; k <= v; ++k) g(k - 1) = y(k) * beta_label(k);
    const Vector mg = emit_ * g;  // V+1
    Vector prev_blank = y(0) * beta_blank + mg;
    Vector prev_label = Vector::Zero(v + 1);
    for (int u = 1; u <= v; ++u)
      prev_label(u) = y(0) * beta_blank(u) + y(u) * beta_label(u) + mg(u) -
                      emit_diag(u - 1) * g(u - 1);
    const double z = prev_blank.sum() + prev_label.sum();
    beta_blank = prev_blank / z;
    beta_label = prev_label / z;
  }
  return out;
}

CrfResult CrfLoss(const Matrix &logits, std::span<const int> labels,
                  const DenominatorGraph &graph) {
  if (logits.cols() != graph.num_units())
    Fail(ErrorCode::kDimensionMismatch, "logit width does not match the graph");
  CtcResult num = CtcLoss(logits, labels);
  const Matrix post = Posteriors(logits);
  const auto den = graph.Run(post);

  CrfResult res;
  res.log_numerator = graph.LogLabelProb(labels) - num.nll;
  res.log_denominator = den.log_total;
  res.nll = res.log_denominator - res.log_numerator;
  if (!std::isfinite(res.nll))
    Fail(ErrorCode::kNonFiniteInput, "label sequence has zero LM probability");
  // d(-log num)/dz = y - gamma_num, d(log Z)/dz = gamma_den - y
  res.grad = num.grad + den.occupancy - post;
  return res;
}

CrfResult CrfLoss(const Matrix &logits, std::span<const int> labels, const PhoneLm *lm) {
  DenominatorGraph graph(static_cast<int>(logits.cols()), lm);
  return CrfLoss(logits, labels, graph);
}

double MaxRelativeError(const Matrix &analytic, const Matrix &numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols())
    Fail(ErrorCode::kDimensionMismatch, "gradient shapes differ");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i], n = numeric.data()[i];
    const double denom = std::max({std::abs(a), std::abs(n), 1e-3});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

double CrfGradCheck(const Matrix &logits, std::span<const int> labels, const PhoneLm *lm,
                    double eps) {
  DenominatorGraph graph(static_cast<int>(logits.cols()), lm);
  const CrfResult base = CrfLoss(logits, labels, graph);
  Matrix numeric(logits.rows(), logits.cols());
  Matrix z = logits;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double orig = z.data()[i];
    z.data()[i] = orig + eps;
    const double up = CrfLoss(z, labels, graph).nll;
    z.data()[i] = orig - eps;
    const double down = CrfLoss(z, labels, graph).nll;
    z.data()[i] = orig;
    numeric.data()[i] = (up - down) / (2.0 * eps);
  }
  return MaxRelativeError(base.grad, numeric);
}

}  // namespace joinap
