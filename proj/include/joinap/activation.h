// joinap/activation.h

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

#ifndef JOINAP_ACTIVATION_H_
#define JOINAP_ACTIVATION_H_

#include <cmath>
#include <random>
#include <string>
#include <string_view>

#include "joinap/common.h"

namespace joinap {

enum class Activation { kSigmoid, kTanh, kRelu, kIdentity };

inline std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

inline Activation ParseActivation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  Fail(ErrorCode::kInvalidConfig, "unknown activation '" + std::string(name) + "'");
}

inline Matrix Activate(Activation a, const Matrix &x) {
  switch (a) {
    case Activation::kSigmoid:
      return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    case Activation::kTanh:
      return x.array().tanh().matrix();
    case Activation::kRelu:
      return x.cwiseMax(0.0);
    case Activation::kIdentity:
      return x;
  }
  return x;
}

// Derivative expressed through the pre-activation x and output y = f(x).
inline Matrix ActivationDerivative(Activation a, const Matrix &x, const Matrix &y) {
  switch (a) {
    case Activation::kSigmoid:
      return (y.array() * (1.0 - y.array())).matrix();
    case Activation::kTanh:
      return (1.0 - y.array().square()).matrix();
    case Activation::kRelu:
      return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::kIdentity:
      return Matrix::Ones(x.rows(), x.cols());
  }
  return Matrix::Ones(x.rows(), x.cols());
}

// Glorot-uniform initializer for a fan_out x fan_in weight.
template <typename Rng>
Matrix GlorotUniform(Eigen::Index fan_out, Eigen::Index fan_in, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(fan_out, fan_in);
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
  return w;
}

}  // namespace joinap

#endif  // JOINAP_ACTIVATION_H_
