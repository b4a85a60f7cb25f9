// joinap/ctc-crf.h

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

#ifndef JOINAP_CTC_CRF_H_
#define JOINAP_CTC_CRF_H_

#include <optional>
#include <span>
#include <vector>

#include "joinap/common.h"
#include "joinap/ctc.h"

namespace joinap {

// n-gram LM (n = 1 or 2) over label sequences with labels 1..V.
//
// Each position either continues with a token drawn from p(u | c) or stops
// with probability q(c), so
//   p(l) = prod_i (1 - q(c_i)) p(l_i | c_i) * q(c_{L+1}).
// c is the start context for the first label and, for bigrams, the previous
// label afterwards. Both p(. | c) and (q, 1 - q) are add-k estimates; a
// context never observed falls back to uniform tokens and the corpus-wide
// stop rate.
class PhoneLm {
 public:
  static PhoneLm Train(std::span<const LabelSequence> corpus, int order, double smoothing,
                       int vocab_size);

  int order() const { return order_; }
  int vocab_size() const { return vocab_size_; }
  double smoothing() const { return smoothing_; }
  int NumContexts() const { return static_cast<int>(log_stop_.size()); }

  // Context id reached after emitting `label` (0 = sentence start; the
  // unigram model has only context 0).
  int ContextAfter(int label) const { return order_ == 2 ? label : 0; }

  double LogTokenProb(int label, int context) const;
  double LogStopProb(int context) const { return log_stop_[context]; }
  double LogContinueProb(int context) const { return log_continue_[context]; }
  // log[(1 - q(c)) p(label | c)], the weight of emitting `label` in context c.
  double LogEmitWeight(int label, int context) const;

  double SequenceLogProb(std::span<const int> labels) const;

 private:
  int order_ = 1;
  int vocab_size_ = 0;
  double smoothing_ = 0.0;
  Matrix log_token_;  // contexts x V
  std::vector<double> log_stop_;
  std::vector<double> log_continue_;
};

// CTC topology composed with the LM context automaton, over an N-unit output
// layer (blank = 0, labels 1..N-1). States are "after a blank, last label u"
// (u = 0..V, u = 0 meaning nothing emitted yet) and "after label u" (u =
// 1..V). Arc weights are exp(LogEmitWeight) on new-label arcs and 1 on blank
// and repeat arcs; final weights are q(context). Without an LM every weight is
// 1, and the path sum equals one for any posteriors.
class DenominatorGraph {
 public:
  struct Arc {
    int from;
    int to;
    int unit;
    double log_weight;
  };

  DenominatorGraph(int num_units, const PhoneLm *lm);

  int num_units() const { return num_units_; }
  int NumStates() const { return 2 * vocab_ + 1; }
  bool has_lm() const { return lm_.has_value(); }
  const PhoneLm *lm() const { return lm_ ? &*lm_ : nullptr; }

  // State ids: blank-state u -> u, label-state u -> vocab + u.
  int StartState() const { return 0; }
  std::vector<Arc> Arcs() const;
  double LogFinalWeight(int state) const;

  // log p(l) under the LM, 0 without one.
  double LogLabelProb(std::span<const int> labels) const;

  struct ForwardBackward {
    double log_total = 0.0;
    Matrix occupancy;  // T x N, posterior of the unit emitted at frame t
  };
  // Exact path sum of prod_t y_t(pi_t) * LM weight over every path, computed
  // with per-frame rescaling, and the per-frame unit posteriors.
  ForwardBackward Run(const Matrix &posteriors) const;

 private:
  int num_units_;
  int vocab_;
  std::optional<PhoneLm> lm_;
  Matrix emit_;  // (V+1) x V, emit_(u, k-1) = weight of new label k after u
  Vector stop_;  // V+1
};

struct CrfResult {
  double nll = 0.0;
  double log_numerator = 0.0;
  double log_denominator = 0.0;
  Matrix grad;  // T x N
};

// nll = -(log p(l) + log sum_{pi in B^-1(l)} prod_t y_t(pi_t)) + log Z, where
// Z sums the same potential over every path. Without an LM (lm == nullptr)
// this is exactly CTC.
CrfResult CrfLoss(const Matrix &logits, std::span<const int> labels, const PhoneLm *lm);
CrfResult CrfLoss(const Matrix &logits, std::span<const int> labels,
                  const DenominatorGraph &graph);

// Max over entries of |a - n| / max(|a|, |n|, 1e-3), a = analytic, n =
// central difference.
double MaxRelativeError(const Matrix &analytic, const Matrix &numeric);

// Compares the analytic CRF gradient with central differences (step eps).
double CrfGradCheck(const Matrix &logits, std::span<const int> labels, const PhoneLm *lm,
                    double eps = 1e-5);

}  // namespace joinap

#endif  // JOINAP_CTC_CRF_H_
