// tests/acoustic-encoder-test.cc

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

#include "doctest.h"
#include "joinap/acoustic-encoder.h"
#include "oracles.h"

using namespace joinap;

TEST_CASE("single affine layer with no context is x W^T + b") {
  EncoderConfig c;
  c.input_dim = 3;
  c.context = 0;
  c.hidden_dims = {};
  c.output_dim = 2;
  c.activation = Activation::kIdentity;
  std::mt19937_64 rng(1);
  EncoderParams p = EncoderParams::Init(c, rng);
  p.biases[0] << 0.5, -0.25;
  const Matrix x = oracle::RandomMatrix(4, 3, rng);
  const Matrix h = EncoderForward(p, x, false, 0).hidden;
  const Matrix expected = (x * p.weights[0].transpose()).rowwise() + p.biases[0].transpose();
  CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("splicing pads edges with zeros") {
  EncoderConfig c;
  c.input_dim = 1;
  c.context = 1;
  c.hidden_dims = {};
  c.output_dim = 3;
  c.activation = Activation::kIdentity;
  EncoderParams p = EncoderParams::Zeros(c);
  p.weights[0] = Matrix::Identity(3, 3);
  Matrix x(3, 1);
  x << 1, 2, 3;
  Matrix expected(3, 3);
  expected << 0, 1, 2, 1, 2, 3, 2, 3, 0;
  CHECK(EncoderForward(p, x, false, 0).hidden == expected);
}

TEST_CASE("backward matches finite differences") {
  std::mt19937_64 rng(2);
  for (bool recurrent : {false, true})
    for (double dropout : {0.0, 0.3}) {
      CAPTURE(recurrent);
      CAPTURE(dropout);
      EncoderConfig c;
      c.input_dim = 3;
      c.context = 1;
      c.hidden_dims = {5, 4};
      c.output_dim = 3;
      c.recurrent = recurrent;
      c.dropout = dropout;
      EncoderParams p = EncoderParams::Init(c, rng);
      const Matrix x = oracle::RandomMatrix(5, 3, rng);
      const Matrix r = oracle::RandomMatrix(5, 3, rng);
      const uint64_t seed = 99;
      const EncoderOutput out = EncoderForward(p, x, true, seed);
      const EncoderGradients g = EncoderBackward(p, out.cache, r);

      auto loss_of_input = [&](const Matrix &xx) {
        return EncoderForward(p, xx, true, seed).hidden.cwiseProduct(r).sum();
      };
      CHECK(oracle::RelativeError(g.input, oracle::NumericGradient(loss_of_input, x)) < 1e-6);

      auto views = p.Params();
      REQUIRE(views.size() == g.params.size());
      for (size_t k = 0; k < views.size(); ++k) {
        CAPTURE(views[k].name);
        Eigen::Map<Matrix> w(views[k].data, g.params[k].rows(), g.params[k].cols());
        const Matrix w0 = w;
        auto f = [&](const Matrix &v) {
          w = v;
          const double s = EncoderForward(p, x, true, seed).hidden.cwiseProduct(r).sum();
          w = w0;
          return s;
        };
        CHECK(oracle::RelativeError(g.params[k], oracle::NumericGradient(f, w0)) < 1e-6);
      }
    }
}

TEST_CASE("dropout is seeded and inactive in eval mode") {
  EncoderConfig c;
  c.input_dim = 2;
  c.hidden_dims = {8};
  c.output_dim = 2;
  c.dropout = 0.5;
  std::mt19937_64 rng(3);
  EncoderParams p = EncoderParams::Init(c, rng);
  const Matrix x = oracle::RandomMatrix(6, 2, rng);
  CHECK(EncoderForward(p, x, true, 5).hidden == EncoderForward(p, x, true, 5).hidden);
  CHECK(EncoderForward(p, x, true, 5).hidden != EncoderForward(p, x, true, 6).hidden);
  CHECK(EncoderForward(p, x, false, 5).hidden == EncoderForward(p, x, false, 6).hidden);
}

TEST_CASE("stale cache and bad shapes are rejected") {
  EncoderConfig c;
  c.input_dim = 2;
  c.output_dim = 2;
  c.hidden_dims = {3};
  std::mt19937_64 rng(4);
  EncoderParams p = EncoderParams::Init(c, rng);
  const Matrix x = oracle::RandomMatrix(3, 2, rng);
  const EncoderOutput out = EncoderForward(p, x, false, 0);
  p.weights[0](0, 0) += 1.0;
  try {
    EncoderBackward(p, out.cache, Matrix::Zero(3, 2));
    FAIL("expected StaleCache");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kStaleCache);
  }
  CHECK_THROWS_AS(EncoderForward(p, Matrix::Zero(3, 5), false, 0), Error);
  EncoderConfig bad = c;
  bad.dropout = 1.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}
