// acoustic-encoder.cc

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

#include "joinap/acoustic-encoder.h"

#include <string>

namespace joinap {

void EncoderConfig::Validate() const {
  if (input_dim < 1) Fail(ErrorCode::kInvalidConfig, "encoder input_dim must be >= 1");
  if (output_dim < 1) Fail(ErrorCode::kInvalidConfig, "encoder output_dim must be >= 1");
  if (context < 0) Fail(ErrorCode::kInvalidConfig, "encoder context must be >= 0");
  for (int h : hidden_dims)
    if (h < 1) Fail(ErrorCode::kInvalidConfig, "hidden widths must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0))
    Fail(ErrorCode::kInvalidConfig, "dropout must be in [0, 1)");
}

namespace {

std::vector<int> LayerWidths(const EncoderConfig &c) {
  std::vector<int> w = c.hidden_dims;
  w.push_back(c.output_dim);
  return w;
}

}  // namespace

EncoderParams EncoderParams::Init(const EncoderConfig &config, std::mt19937_64 &rng) {
  config.Validate();
  EncoderParams p;
  p.config = config;
  int in = config.SplicedDim();
  for (int out : LayerWidths(config)) {
    p.weights.push_back(GlorotUniform(out, in, rng));
    p.biases.push_back(Vector::Zero(out));
    in = out;
  }
  if (config.recurrent) {
    const int h0 = static_cast<int>(p.weights[0].rows());
    p.recurrent_weight = GlorotUniform(h0, h0, rng) * 0.5;
  }
  return p;
}

EncoderParams EncoderParams::Zeros(const EncoderConfig &config) {
  config.Validate();
  EncoderParams p;
  p.config = config;
  int in = config.SplicedDim();
  for (int out : LayerWidths(config)) {
    p.weights.push_back(Matrix::Zero(out, in));
    p.biases.push_back(Vector::Zero(out));
    in = out;
  }
  if (config.recurrent) {
    const auto h0 = p.weights[0].rows();
    p.recurrent_weight = Matrix::Zero(h0, h0);
  }
  return p;
}

std::vector<ParamView> EncoderParams::Params() {
  std::vector<ParamView> v;
  for (size_t l = 0; l < weights.size(); ++l) {
    v.push_back({"encoder.weight_" + std::to_string(l), weights[l].data(), weights[l].size()});
    v.push_back({"encoder.bias_" + std::to_string(l), biases[l].data(), biases[l].size()});
  }
  if (config.recurrent)
    v.push_back({"encoder.recurrent", recurrent_weight.data(), recurrent_weight.size()});
  return v;
}

uint64_t EncoderParams::Checksum() const {
  auto views = const_cast<EncoderParams *>(this)->Params();
  return ChecksumParams(views);
}

EncoderOutput EncoderForward(const EncoderParams &params, const Matrix &frames,
                             bool train_mode, uint64_t seed) {
  const EncoderConfig &cfg = params.config;
  const Eigen::Index num_frames = frames.rows();
  const int dim = cfg.input_dim;
  if (num_frames < 1) Fail(ErrorCode::kDimensionMismatch, "encoder needs T >= 1");
  if (frames.cols() != dim)
    Fail(ErrorCode::kDimensionMismatch,
         "frames have " + std::to_string(frames.cols()) + " dims, encoder expects " +
             std::to_string(dim));
  if (!frames.allFinite()) Fail(ErrorCode::kNonFiniteInput, "frames contain inf/nan");

  EncoderOutput out;
  EncoderCache &cache = out.cache;
  cache.param_digest = params.Checksum();

  const int w = cfg.context;
  cache.spliced = Matrix::Zero(num_frames, cfg.SplicedDim());
  for (Eigen::Index t = 0; t < num_frames; ++t)
    for (int o = -w; o <= w; ++o) {
      const Eigen::Index s = t + o;
      if (s < 0 || s >= num_frames) continue;
      cache.spliced.block(t, (o + w) * dim, 1, dim) = frames.row(s);
    }

  std::mt19937_64 rng(seed);
  const bool use_dropout = train_mode && cfg.dropout > 0.0;
  std::bernoulli_distribution keep(1.0 - cfg.dropout);
  const int num_layers = static_cast<int>(params.weights.size());

  Matrix x = cache.spliced;
  for (int l = 0; l < num_layers; ++l) {
    const Matrix &wl = params.weights[l];
    cache.layer_inputs.push_back(x);
    Matrix pre = x * wl.transpose();
    pre.rowwise() += params.biases[l].transpose();
    Matrix act;
    if (l == 0 && cfg.recurrent) {
      act.resize(num_frames, wl.rows());
      for (Eigen::Index t = 0; t < num_frames; ++t) {
        if (t > 0) pre.row(t) += act.row(t - 1) * params.recurrent_weight.transpose();
        act.row(t) = Activate(cfg.activation, pre.row(t));
      }
    } else {
      act = Activate(cfg.activation, pre);
    }
    Matrix y = act;
    if (use_dropout && l + 1 < num_layers) {
      Matrix mask(act.rows(), act.cols());
      const double scale = 1.0 / (1.0 - cfg.dropout);
      for (Eigen::Index c = 0; c < mask.cols(); ++c)
        for (Eigen::Index r = 0; r < mask.rows(); ++r) mask(r, c) = keep(rng) ? scale : 0.0;
      y = y.cwiseProduct(mask);
      cache.masks.push_back(std::move(mask));
    } else {
      cache.masks.emplace_back();
    }
    cache.pre.push_back(std::move(pre));
    cache.act.push_back(std::move(act));
    x = std::move(y);
  }
  out.hidden = std::move(x);
  return out;
}

EncoderGradients EncoderBackward(const EncoderParams &params, const EncoderCache &cache,
                                 const Matrix &grad_hidden) {
  const EncoderConfig &cfg = params.config;
  const int num_layers = static_cast<int>(params.weights.size());
  if (static_cast<int>(cache.pre.size()) != num_layers || cache.param_digest != params.Checksum())
    Fail(ErrorCode::kStaleCache, "encoder cache does not match current parameters");
  const Eigen::Index num_frames = cache.spliced.rows();
  if (grad_hidden.rows() != num_frames || grad_hidden.cols() != cfg.output_dim)
    Fail(ErrorCode::kDimensionMismatch, "dL/dH has the wrong shape");

  std::vector<Matrix> grad_w(num_layers), grad_b(num_layers);
  Matrix grad_r;
  Matrix grad_out = grad_hidden;
  for (int l = num_layers - 1; l >= 0; --l) {
    Matrix grad_act = cache.masks[l].size() ? grad_out.cwiseProduct(cache.masks[l]) : grad_out;
    const Matrix deriv = ActivationDerivative(cfg.activation, cache.pre[l], cache.act[l]);
    Matrix grad_pre(grad_act.rows(), grad_act.cols());
    if (l == 0 && cfg.recurrent) {
      const Matrix &r = params.recurrent_weight;
      Eigen::RowVectorXd carry = Eigen::RowVectorXd::Zero(grad_act.cols());
      for (Eigen::Index t = num_frames - 1; t >= 0; --t) {
        grad_pre.row(t) = (grad_act.row(t) + carry).cwiseProduct(deriv.row(t));
        carry = grad_pre.row(t) * r;
      }
      grad_r = Matrix::Zero(r.rows(), r.cols());
      if (num_frames > 1)
        grad_r = grad_pre.bottomRows(num_frames - 1).transpose() *
                 cache.act[0].topRows(num_frames - 1);
    } else {
      grad_pre = grad_act.cwiseProduct(deriv);
    }
    grad_w[l] = grad_pre.transpose() * cache.layer_inputs[l];
    grad_b[l] = grad_pre.colwise().sum().transpose();
    grad_out = grad_pre * params.weights[l];
  }

  EncoderGradients g;
  for (int l = 0; l < num_layers; ++l) {
    g.params.push_back(std::move(grad_w[l]));
    g.params.push_back(std::move(grad_b[l]));
  }
  if (cfg.recurrent) g.params.push_back(std::move(grad_r));

  const int dim = cfg.input_dim, w = cfg.context;
  g.input = Matrix::Zero(num_frames, dim);
  for (Eigen::Index t = 0; t < num_frames; ++t)
    for (int o = -w; o <= w; ++o) {
      const Eigen::Index s = t + o;
      if (s < 0 || s >= num_frames) continue;
      g.input.row(s) += grad_out.block(t, (o + w) * dim, 1, dim);
    }
  return g;
}

}  // namespace joinap
