// tests/embedding-head-test.cc

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

#include <limits>

#include "doctest.h"
#include "joinap/embedding-head.h"
#include "joinap/phono-features.h"
#include "oracles.h"

using namespace joinap;

namespace {

const FeatureTable &Table() {
  static const FeatureTable t = FeatureTable::ReadFile(JOINAP_FEATURES);
  return t;
}

Matrix SomePhono(int n) {
  std::vector<std::string> units = {"<blk>", "<spn>", "<nsn>"};
  for (int i = 0; static_cast<int>(units.size()) < n; ++i) units.push_back(Table().Phones()[i]);
  return EncodeUnits(Table(), units);
}

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::kIoFailure;
}

}  // namespace

TEST_CASE("linear and nonlinear embeddings follow their formulas") {
  std::mt19937_64 rng(3);
  const Matrix p = SomePhono(6);
  HeadOptions opts;
  opts.hidden_dim = 7;
  opts.use_bias = true;
  auto lin = std::get<LinearHead>(InitHead(HeadKind::kLinear, 6, 4, opts, rng));
  lin.bias = oracle::RandomMatrix(4, 1, rng);
  const Matrix e = ComputeEmbeddings(lin, p).embeddings;
  for (int i = 0; i < 6; ++i)
    for (int h = 0; h < 4; ++h) {
      double s = (*lin.bias)(h);
      for (int b = 0; b < kPhonoDim; ++b) s += lin.weight(h, b) * p(i, b);
      CHECK(e(i, h) == doctest::Approx(s).epsilon(1e-12));
    }

  auto nl = std::get<NonlinearHead>(InitHead(HeadKind::kNonlinear, 6, 4, opts, rng));
  const Matrix en = ComputeEmbeddings(nl, p).embeddings;
  for (int i = 0; i < 6; ++i)
    for (int h = 0; h < 4; ++h) {
      double s = 0.0;
      for (int j = 0; j < 7; ++j) {
        double a = 0.0;
        for (int b = 0; b < kPhonoDim; ++b) a += nl.hidden_weight(j, b) * p(i, b);
        s += nl.output_weight(h, j) / (1.0 + std::exp(-a));
      }
      CHECK(en(i, h) == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("logits are inner products and posteriors normalize") {
  std::mt19937_64 rng(4);
  const Matrix e = oracle::RandomMatrix(5, 3, rng);
  const Matrix h = oracle::RandomMatrix(4, 3, rng);
  const Matrix z = Logits(e, h);
  CHECK(z(2, 1) == doctest::Approx(e.row(1).dot(h.row(2))));
  const Matrix y = Posteriors(z);
  for (int t = 0; t < 4; ++t) CHECK(y.row(t).sum() == doctest::Approx(1.0));
  CHECK((LogPosteriors(z).array().exp().matrix() - y).cwiseAbs().maxCoeff() < 1e-12);
  Matrix bad = z;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(CodeOf([&] { Posteriors(bad); }) == ErrorCode::kNonFiniteInput);
}

TEST_CASE("head gradients match finite differences") {
  std::mt19937_64 rng(5);
  const Matrix p = SomePhono(6);
  for (HeadKind kind : {HeadKind::kFlat, HeadKind::kLinear, HeadKind::kNonlinear})
    for (bool bias : {false, true})
      for (Activation act : {Activation::kSigmoid, Activation::kTanh}) {
        CAPTURE(HeadKindName(kind));
        HeadOptions opts{5, act, bias};
        EmbeddingHead head = InitHead(kind, 6, 3, opts, rng);
        // Nonzero biases so their gradients are exercised away from zero.
        for (auto &v : HeadParams(head))
          if (v.name.find("bias") != std::string::npos)
            for (Eigen::Index i = 0; i < v.size; ++i) v.data[i] = 0.1 * static_cast<double>(i + 1);
        const Matrix r = oracle::RandomMatrix(6, 3, rng);
        const auto grads = HeadBackward(head, p, r);
        auto views = HeadParams(head);
        REQUIRE(grads.size() == views.size());
        for (size_t k = 0; k < views.size(); ++k) {
          CAPTURE(views[k].name);
          Eigen::Map<Matrix> w(views[k].data, grads[k].rows(), grads[k].cols());
          const Matrix w0 = w;
          auto f = [&](const Matrix &x) {
            w = x;
            const double v = ComputeEmbeddings(head, p).embeddings.cwiseProduct(r).sum();
            w = w0;
            return v;
          };
          CHECK(oracle::RelativeError(grads[k], oracle::NumericGradient(f, w0)) < 1e-6);
        }
      }
}

TEST_CASE("shape checks") {
  std::mt19937_64 rng(6);
  EmbeddingHead flat = InitHead(HeadKind::kFlat, 4, 3, {}, rng);
  EmbeddingHead lin = InitHead(HeadKind::kLinear, 4, 3, {}, rng);
  CHECK_NOTHROW(ComputeEmbeddings(flat, Matrix()));
  CHECK(CodeOf([&] { ComputeEmbeddings(flat, SomePhono(5)); }) == ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([&] { ComputeEmbeddings(lin, Matrix::Zero(4, 50)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("extension modes") {
  std::mt19937_64 rng(8);
  const Matrix new_p = SomePhono(5).bottomRows(2);
  EmbeddingHead lin = InitHead(HeadKind::kLinear, 0, 3, {}, rng);
  EmbeddingHead flat = InitHead(HeadKind::kFlat, 4, 3, {}, rng);
  const uint64_t before = HeadChecksum(lin);

  ExtensionOptions phon;
  CHECK(ExtendInventory(lin, new_p, phon) == ComputeEmbeddings(lin, new_p).embeddings);
  CHECK(HeadChecksum(lin) == before);
  CHECK(CodeOf([&] { ExtendInventory(flat, new_p, phon); }) == ErrorCode::kModeHeadMismatch);

  ExtensionOptions rnd;
  rnd.mode = ExtensionMode::kRandom;
  rnd.seed = 11;
  CHECK(CodeOf([&] { ExtendInventory(lin, new_p, rnd); }) == ErrorCode::kModeHeadMismatch);
  const Matrix r1 = ExtendInventory(flat, new_p, rnd);
  CHECK(r1 == ExtendInventory(flat, new_p, rnd));
  CHECK(r1.rows() == 2);
  CHECK(r1.cwiseAbs().maxCoeff() < 0.1);

  ExtensionOptions mean;
  mean.mode = ExtensionMode::kMeanOfSeen;
  mean.seen_rows = {1, 3};
  const Matrix &t = std::get<FlatHead>(flat).table;
  const Matrix m = ExtendInventory(flat, new_p, mean);
  CHECK((m.row(0) - 0.5 * (t.row(1) + t.row(3))).norm() < 1e-15);

  FlatHead grown = std::get<FlatHead>(flat);
  AppendFlatRows(grown, r1);
  CHECK(grown.table.rows() == 6);
  CHECK(grown.table.bottomRows(2) == r1);
}

TEST_CASE("names round trip") {
  for (HeadKind k : {HeadKind::kFlat, HeadKind::kLinear, HeadKind::kNonlinear})
    CHECK(ParseHeadKind(HeadKindName(k)) == k);
  for (ExtensionMode m : {ExtensionMode::kPhonology, ExtensionMode::kRandom, ExtensionMode::kMeanOfSeen})
    CHECK(ParseExtensionMode(ExtensionModeName(m)) == m);
  CHECK_THROWS_AS(ParseHeadKind("deep"), Error);
}
