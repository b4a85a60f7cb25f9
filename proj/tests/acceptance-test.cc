// tests/acceptance-test.cc

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

// Release acceptance suite: one PASS/FAIL line per criterion, nonzero exit if
// anything fails. Each criterion also has a wall-clock budget.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "joinap/benchmark.h"
#include "joinap/trainer.h"
#include "oracles.h"

using namespace joinap;

namespace {

int g_failures = 0;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void Report(int id, const std::string &name, bool ok, double seconds, double budget,
            const std::string &detail) {
  const bool pass = ok && seconds < budget;
  if (!pass) ++g_failures;
  std::printf("%s %d %s: %s [%.2f s, budget %.0f s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), seconds, budget);
  std::fflush(stdout);
}

std::string Fmt(const char *fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

const FeatureTable &Table() {
  static const FeatureTable t = FeatureTable::ReadFile(JOINAP_FEATURES);
  return t;
}

void EncodingFidelity() {
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"d", "--+----0+--++-------0-00"},  {"ɛ", "++-+---0+--0-0--------00"},
      {"ð", "--++---0+--+++------0-00"},  {"ə", "++-+---0+--0-0---+----00"},
      {"i", "++-+---0+--0-0-+----+-00"},  {"ʥ", "--+-+--0+---++-+----0-00"},
      {"kʲ", "--+----0-----0-+----0-00"},
  };
  int exact = 0;
  for (const auto &[phone, marks] : expected) {
    std::string got;
    for (auto v : EncodePhone(Table(), phone).DecodeFeatures()) got += FeatureMark(v);
    exact += got == marks;
  }
  Report(1, "encoding-fidelity", exact == 7, Seconds(start), 1,
         std::to_string(exact) + "/7 reference phones exact");
}

void CtcExactness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  double worst_value = 0.0, worst_grad = 0.0;
  int done = 0;
  while (done < 100) {
    const int n = std::uniform_int_distribution<int>(2, 4)(rng);
    const int t_len = std::uniform_int_distribution<int>(1, 4)(rng);
    const int l_len = std::uniform_int_distribution<int>(1, 2)(rng);
    LabelSequence labels;
    for (int i = 0; i < l_len; ++i)
      labels.push_back(std::uniform_int_distribution<int>(1, n - 1)(rng));
    if (MinFramesForLabels(labels) > t_len) continue;
    const Matrix z = oracle::RandomMatrix(t_len, n, rng, 2.0);
    const CtcResult r = CtcLoss(z, labels);
    worst_value = std::max(worst_value, std::abs(r.nll - oracle::CtcNll(z, labels)));
    auto f = [&](const Matrix &x) { return CtcLoss(x, labels).nll; };
    worst_grad = std::max(worst_grad, oracle::RelativeError(r.grad, oracle::NumericGradient(f, z)));
    ++done;
  }
  Report(2, "ctc-exactness", worst_value < 1e-9 && worst_grad < 1e-4, Seconds(start), 10,
         Fmt("max |nll - enumeration| = %.2e, max gradient rel. err = %.2e", worst_value,
             worst_grad));
}

void CrfReduction() {
  const auto start = Clock::now();
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    const int t_len = std::uniform_int_distribution<int>(1, 12)(rng);
    const int l_len = std::uniform_int_distribution<int>(1, 4)(rng);
    LabelSequence labels;
    for (int i = 0; i < l_len; ++i)
      labels.push_back(std::uniform_int_distribution<int>(1, n - 1)(rng));
    if (MinFramesForLabels(labels) > t_len) continue;
    const Matrix z = oracle::RandomMatrix(t_len, n, rng, 3.0);
    const CrfResult crf = CrfLoss(z, labels, nullptr);
    const CtcResult ctc = CtcLoss(z, labels);
    worst = std::max({worst, std::abs(crf.nll - ctc.nll), (crf.grad - ctc.grad).cwiseAbs().maxCoeff()});
    ++done;
  }
  Report(3, "ctc-crf-reduces-to-ctc", worst < 1e-8, Seconds(start), 10,
         Fmt("max value/gradient difference = %.2e", worst));
}

std::vector<LabelSequence> RandomLabelCorpus(int vocab, std::mt19937_64 &rng) {
  std::vector<LabelSequence> corpus;
  const int n = std::uniform_int_distribution<int>(1, 6)(rng);
  for (int i = 0; i < n; ++i) {
    LabelSequence s;
    const int len = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int j = 0; j < len; ++j) s.push_back(std::uniform_int_distribution<int>(1, vocab)(rng));
    corpus.push_back(s);
  }
  return corpus;
}

void CrfExactness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 3)(rng);
    const int t_len = std::uniform_int_distribution<int>(1, 3)(rng);
    const PhoneLm lm = PhoneLm::Train(RandomLabelCorpus(n - 1, rng), 2, 1.0, n - 1);
    const DenominatorGraph g(n, &lm);
    const Matrix z = oracle::RandomMatrix(t_len, n, rng, 2.0);
    const double brute = std::log(oracle::CrfDenominator(z, &lm));
    worst = std::max(worst, std::abs(g.Run(Posteriors(z)).log_total - brute));
  }
  Report(4, "ctc-crf-denominator", worst < 1e-9, Seconds(start), 10,
         Fmt("max |log denominator - enumeration| = %.2e", worst));
}

void GradientChain() {
  const auto start = Clock::now();
  const std::vector<std::string> units = {"<blk>", "<spn>", "<nsn>", "d", "i", "ʥ"};
  std::mt19937_64 rng(104);
  Utterance utt;
  utt.frames = oracle::RandomMatrix(5, 4, rng);
  utt.labels = {3, 5, 4};
  const PhoneLm lm =
      PhoneLm::Train(std::vector<LabelSequence>{{3, 5}, {4}, {5, 4, 3}, {1}}, 2, 1.0, 5);
  const DenominatorGraph graph(6, &lm);
  EncoderConfig enc;
  enc.input_dim = 4;
  enc.context = 1;
  enc.hidden_dims = {6};
  enc.output_dim = 8;
  HeadOptions opts;
  opts.hidden_dim = 7;
  double worst = 0.0;
  int checks = 0;
  for (HeadKind head : {HeadKind::kFlat, HeadKind::kLinear, HeadKind::kNonlinear})
    for (LossKind loss : {LossKind::kCtc, LossKind::kCtcCrf}) {
      AcousticModel m = InitModel(units, Table(), enc, head, opts, 11);
      const auto lg = UtteranceLoss(m, m.Embeddings(), utt, loss, &graph, false, 0);
      auto views = m.Params();
      for (size_t k = 0; k < views.size(); ++k) {
        Eigen::Map<Matrix> w(views[k].data, lg.grads[k].rows(), lg.grads[k].cols());
        const Matrix w0 = w;
        auto f = [&](const Matrix &x) {
          w = x;
          const double v = UtteranceNll(m, m.Embeddings(), utt, loss, &graph);
          w = w0;
          return v;
        };
        worst = std::max(worst, oracle::RelativeError(lg.grads[k], oracle::NumericGradient(f, w0)));
        ++checks;
      }
    }
  Report(5, "end-to-end-gradients", worst < 1e-4, Seconds(start), 30,
         Fmt("%.0f parameter blocks over 3 heads x 2 losses, max rel. err = %.2e", checks, worst));
}

void Benchmark() {
  const auto start = Clock::now();
  const BenchmarkConfig cfg;
  BenchmarkRequest req;
  req.seeds = {1, 2, 3, 4, 5};
  req.conditions = {BenchCondition::kZeroShot, BenchCondition::kFewShot};
  const auto records = RunBenchmark(Table(), cfg, req);
  const double seconds = Seconds(start);

  auto med = [&](HeadKind h, BenchCondition c, PerField f) {
    return MedianPer(records, MethodName(h), c, f);
  };
  const auto zs = BenchCondition::kZeroShot, fs = BenchCondition::kFewShot;
  const double flat = med(HeadKind::kFlat, zs, PerField::kOverall);
  const double non = med(HeadKind::kNonlinear, zs, PerField::kOverall);
  const double flat_u = med(HeadKind::kFlat, zs, PerField::kUnseen);
  const double lin_u = med(HeadKind::kLinear, zs, PerField::kUnseen);
  const double non_u = med(HeadKind::kNonlinear, zs, PerField::kUnseen);
  Report(6, "zero-shot-ordering", non < flat && lin_u < flat_u && non_u < flat_u, seconds, 600,
         Fmt("median PER nonlinear %.3f vs flat %.3f; ", non, flat) +
             Fmt("unseen PER linear %.3f, nonlinear %.3f vs flat %.3f", lin_u, non_u, flat_u));

  bool improved = true;
  std::string detail;
  for (HeadKind h : {HeadKind::kFlat, HeadKind::kLinear, HeadKind::kNonlinear}) {
    const double z = med(h, zs, PerField::kOverall), f = med(h, fs, PerField::kOverall);
    improved = improved && f < z;
    detail += MethodName(h) + Fmt(" %.3f -> %.3f; ", z, f);
  }
  Report(7, "few-shot-improvement", improved, seconds, 600,
         detail + "zero-shot and few-shot share one training pass");
}

void Determinism() {
  const auto start = Clock::now();
  const auto dir = std::filesystem::temp_directory_path() / "joinap-acceptance-determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::string bytes[2];
  bool ran = true;
  for (int i = 0; i < 2; ++i) {
    const auto out = (dir / ("run" + std::to_string(i) + ".jsonl")).string();
    const std::string cmd = std::string(JOINAP_CLI) +
                            " bench zero-shot --seed 7 --deterministic --out " + out +
                            " >/dev/null 2>&1";
    ran = ran && std::system(cmd.c_str()) == 0;
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    bytes[i] = ss.str();
  }
  std::filesystem::remove_all(dir);
  const bool same = ran && !bytes[0].empty() && bytes[0] == bytes[1];
  Report(8, "determinism", same, Seconds(start), 600,
         ran ? std::to_string(bytes[0].size()) + " report bytes, runs " +
                   (same ? "identical" : "differ")
             : "CLI run failed");
}

void InventoryStatistics() {
  const auto start = Clock::now();
  std::mt19937_64 rng(109);
  const auto &all = Table().Phones();
  const std::vector<std::string> pool(all.begin(), all.begin() + 30);
  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int num_langs = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<LanguageInventory> invs;
    for (int l = 0; l < num_langs; ++l) {
      LanguageInventory inv{"L" + std::to_string(l), {}};
      for (const auto &p : pool)
        if (std::bernoulli_distribution(0.3)(rng)) inv.phones.push_back(p);
      invs.push_back(inv);
    }
    LanguageInventory target{"T", {}};
    for (const auto &p : pool)
      if (std::bernoulli_distribution(0.25)(rng)) target.phones.push_back(p);

    const auto set = UniversalPhoneSet::Merge(invs);
    const auto hist = LanguageDegree(set);
    int total = 0;
    for (auto [d, c] : hist) total += c;
    const auto part = UnseenPhones(set, target);
    const auto [seen, unseen] = oracle::SeenUnseen(invs, target);
    agree += hist == oracle::LanguageDegree(invs) &&
             total == static_cast<int>(set.Phones().size()) &&
             std::set<std::string>(part.seen.begin(), part.seen.end()) == seen &&
             std::set<std::string>(part.unseen.begin(), part.unseen.end()) == unseen;
  }
  Report(9, "inventory-statistics", agree == 100, Seconds(start), 5,
         std::to_string(agree) + "/100 configurations match the oracles");
}

}  // namespace

int main() {
  EncodingFidelity();
  CtcExactness();
  CrfReduction();
  CrfExactness();
  GradientChain();
  Benchmark();
  Determinism();
  InventoryStatistics();
  std::printf("%s: %d failing criteria\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
