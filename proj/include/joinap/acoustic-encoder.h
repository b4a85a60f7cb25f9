// joinap/acoustic-encoder.h

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

#ifndef JOINAP_ACOUSTIC_ENCODER_H_
#define JOINAP_ACOUSTIC_ENCODER_H_

#include <random>
#include <vector>

#include "joinap/activation.h"
#include "joinap/common.h"

namespace joinap {

// Spliced-frame feed-forward stack: frame t sees frames t-w .. t+w (zero
// padded at the edges), followed by hidden_dims.size() + 1 affine layers, each
// followed by the activation. With `recurrent` the first layer also receives
// its own previous-frame output through a square recurrent matrix.
struct EncoderConfig {
  int input_dim = 16;
  int context = 2;
  std::vector<int> hidden_dims = {64};
  int output_dim = 64;
  Activation activation = Activation::kTanh;
  bool recurrent = false;
  double dropout = 0.0;  // applied to hidden layer outputs in train mode

  void Validate() const;
  int SplicedDim() const { return input_dim * (2 * context + 1); }
  int NumLayers() const { return static_cast<int>(hidden_dims.size()) + 1; }
};

struct EncoderParams {
  EncoderConfig config;
  std::vector<Matrix> weights;  // layer l: out x in
  std::vector<Vector> biases;
  Matrix recurrent_weight;      // h0 x h0 when config.recurrent, else empty

  static EncoderParams Init(const EncoderConfig &config, std::mt19937_64 &rng);
  static EncoderParams Zeros(const EncoderConfig &config);

  // Order: weight_0, bias_0, weight_1, bias_1, ..., [recurrent].
  std::vector<ParamView> Params();
  uint64_t Checksum() const;
};

struct EncoderCache {
  uint64_t param_digest = 0;
  Matrix spliced;
  std::vector<Matrix> layer_inputs;
  std::vector<Matrix> pre;
  std::vector<Matrix> act;    // before dropout
  std::vector<Matrix> masks;  // empty when no dropout was applied
};

struct EncoderOutput {
  Matrix hidden;  // T x H
  EncoderCache cache;
};

EncoderOutput EncoderForward(const EncoderParams &params, const Matrix &frames,
                             bool train_mode, uint64_t seed);

struct EncoderGradients {
  std::vector<Matrix> params;  // EncoderParams::Params() order
  Matrix input;                // T x D
};

// Throws kStaleCache if the parameters changed since the forward pass.
EncoderGradients EncoderBackward(const EncoderParams &params, const EncoderCache &cache,
                                 const Matrix &grad_hidden);

}  // namespace joinap

#endif  // JOINAP_ACOUSTIC_ENCODER_H_
