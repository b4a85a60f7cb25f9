// trainer.cc

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

#include "joinap/trainer.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "joinap/ctc.h"
#include "joinap/decode-eval.h"
#include "json.hpp"

namespace joinap {

std::string_view LossKindName(LossKind kind) {
  return kind == LossKind::kCtc ? "ctc" : "ctc-crf";
}

LossKind ParseLossKind(std::string_view name) {
  if (name == "ctc") return LossKind::kCtc;
  if (name == "ctc-crf" || name == "ctc_crf") return LossKind::kCtcCrf;
  Fail(ErrorCode::kInvalidConfig, "unknown loss '" + std::string(name) + "'");
}

void TrainConfig::Validate() const {
  encoder.Validate();
  if (!(initial_lr > 0.0)) Fail(ErrorCode::kInvalidConfig, "initial lr must be > 0");
  if (!(lr_floor > 0.0 && lr_floor < initial_lr))
    Fail(ErrorCode::kInvalidConfig, "need 0 < lr floor < initial lr");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
    Fail(ErrorCode::kInvalidConfig, "plateau factor must be in (0, 1)");
  if (patience < 1) Fail(ErrorCode::kInvalidConfig, "patience must be >= 1");
  if (batch_size < 1) Fail(ErrorCode::kInvalidConfig, "batch size must be >= 1");
  if (max_epochs < 0) Fail(ErrorCode::kInvalidConfig, "max epochs must be >= 0");
  if (!(clip_norm > 0.0)) Fail(ErrorCode::kInvalidConfig, "clip norm must be > 0");
  if (!(dev_fraction >= 0.0 && dev_fraction < 1.0))
    Fail(ErrorCode::kInvalidConfig, "dev fraction must be in [0, 1)");
  if (lm_order != 1 && lm_order != 2) Fail(ErrorCode::kInvalidConfig, "lm order must be 1 or 2");
  if (!(lm_smoothing > 0.0)) Fail(ErrorCode::kInvalidConfig, "lm smoothing must be > 0");
  if (num_threads < 1) Fail(ErrorCode::kInvalidConfig, "num threads must be >= 1");
  if (head_options.hidden_dim < 1) Fail(ErrorCode::kInvalidConfig, "head hidden dim must be >= 1");
}

bool TrainConfig::IsFrozen(const std::string &name) const {
  if (freeze.count(name)) return true;
  for (const auto &group : freeze)
    if (name.rfind(group + ".", 0) == 0) return true;
  return false;
}

std::string TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["loss"] = LossKindName(loss);
  j["head"] = HeadKindName(head);
  j["head_hidden_dim"] = head_options.hidden_dim;
  j["head_activation"] = ActivationName(head_options.activation);
  j["head_bias"] = head_options.use_bias;
  j["encoder"] = {{"input_dim", encoder.input_dim},
                  {"context", encoder.context},
                  {"hidden_dims", encoder.hidden_dims},
                  {"output_dim", encoder.output_dim},
                  {"activation", ActivationName(encoder.activation)},
                  {"recurrent", encoder.recurrent},
                  {"dropout", encoder.dropout}};
  j["initial_lr"] = initial_lr;
  j["plateau_factor"] = plateau_factor;
  j["lr_floor"] = lr_floor;
  j["patience"] = patience;
  j["min_improvement"] = min_improvement;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["seed"] = seed;
  j["clip_norm"] = clip_norm;
  j["dev_fraction"] = dev_fraction;
  j["freeze"] = freeze;
  j["lm_order"] = lm_order;
  j["lm_smoothing"] = lm_smoothing;
  j["deterministic"] = deterministic;
  return j.dump();
}

void AdamStep(std::span<const ParamView> params, std::span<const Matrix> grads,
              AdamState &state, double lr, const std::vector<bool> &active) {
  if (grads.size() != params.size())
    Fail(ErrorCode::kShapeMismatch, "parameter and gradient counts differ");
  if (!active.empty() && active.size() != params.size())
    Fail(ErrorCode::kShapeMismatch, "active mask has the wrong length");
  if (state.m.empty()) {
    for (const auto &p : params) {
      state.m.push_back(Vector::Zero(p.size));
      state.v.push_back(Vector::Zero(p.size));
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size())
    Fail(ErrorCode::kShapeMismatch, "optimizer state does not match the parameters");
  for (size_t i = 0; i < params.size(); ++i)
    if (grads[i].size() != params[i].size || state.m[i].size() != params[i].size ||
        state.v[i].size() != params[i].size)
      Fail(ErrorCode::kShapeMismatch, "shape mismatch for " + params[i].name);

  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    if (!active.empty() && !active[i]) continue;
    Eigen::Map<Vector> w(params[i].data, params[i].size);
    Eigen::Map<const Vector> g(grads[i].data(), grads[i].size());
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g.cwiseAbs2();
    w.array() -= lr * (state.m[i].array() / c1) /
                 ((state.v[i].array() / c2).sqrt() + state.eps);
  }
}

namespace {

struct UttGrad {
  double nll = 0.0;
  std::vector<Matrix> encoder;
  Matrix embeddings;  // dL/dE
};

UttGrad ComputeUttGrad(const AcousticModel &model, const Matrix &embeddings,
                       const Utterance &utt, LossKind loss, const DenominatorGraph *graph,
                       bool train_mode, uint64_t seed) {
  EncoderOutput enc = EncoderForward(model.encoder, utt.frames, train_mode, seed);
  const Matrix z = Logits(embeddings, enc.hidden);
  UttGrad out;
  Matrix dz;
  if (loss == LossKind::kCtc) {
    CtcResult r = CtcLoss(z, utt.labels);
    out.nll = r.nll;
    dz = std::move(r.grad);
  } else {
    if (!graph) Fail(ErrorCode::kInvalidConfig, "ctc-crf loss needs a denominator graph");
    CrfResult r = CrfLoss(z, utt.labels, *graph);
    out.nll = r.nll;
    dz = std::move(r.grad);
  }
  out.embeddings = dz.transpose() * enc.hidden;
  out.encoder = EncoderBackward(model.encoder, enc.cache, dz * embeddings).params;
  return out;
}

uint64_t Mix(uint64_t a, uint64_t b) {
  uint64_t z = a * 0x9e3779b97f4a7c15ull + b + 0x632be59bd9b4e5f5ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots so the caller can reduce in a fixed order.
template <typename Fn>
void ParallelFor(size_t n, int threads, Fn fn) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t workers = std::min(n, static_cast<size_t>(threads));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

double MeanNll(const AcousticModel &model, std::span<const Utterance> utts, LossKind loss,
               const DenominatorGraph *graph, int threads) {
  if (utts.empty()) return 0.0;
  const Matrix e = model.Embeddings();
  std::vector<double> nll(utts.size());
  ParallelFor(utts.size(), threads,
              [&](size_t i) { nll[i] = UtteranceNll(model, e, utts[i], loss, graph); });
  return std::accumulate(nll.begin(), nll.end(), 0.0) / static_cast<double>(utts.size());
}

}  // namespace

LossAndGradient UtteranceLoss(const AcousticModel &model, const Matrix &embeddings,
                              const Utterance &utt, LossKind loss,
                              const DenominatorGraph *graph, bool train_mode,
                              uint64_t dropout_seed) {
  UttGrad g = ComputeUttGrad(model, embeddings, utt, loss, graph, train_mode, dropout_seed);
  LossAndGradient out;
  out.nll = g.nll;
  out.grads = std::move(g.encoder);
  for (auto &h : HeadBackward(model.head, model.phono, g.embeddings))
    out.grads.push_back(std::move(h));
  return out;
}

double UtteranceNll(const AcousticModel &model, const Matrix &embeddings, const Utterance &utt,
                    LossKind loss, const DenominatorGraph *graph) {
  const Matrix z = Logits(embeddings, EncoderForward(model.encoder, utt.frames, false, 0).hidden);
  if (loss == LossKind::kCtc) {
    return CtcLoss(z, utt.labels).nll;
  }
  if (!graph) Fail(ErrorCode::kInvalidConfig, "ctc-crf loss needs a denominator graph");
  return CrfLoss(z, utt.labels, *graph).nll;
}

void TrainReport::Write(std::ostream &os) const {
  for (const auto &e : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["dev_loss"] = e.dev_loss;
    j["dev_PER"] = e.dev_per;
    j["lr"] = e.lr;
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["checksum"] = HexDigest(checksum);
  s["skipped_utterances"] = skipped;
  s["updated_parameters"] = frozen.empty() ? "all" : "all except frozen";
  s["frozen"] = frozen;
  s["stop_reason"] = stop_reason;
  os << s.dump() << '\n';
}

TrainResult RunTraining(AcousticModel model, std::vector<Utterance> utterances,
                        const TrainConfig &config) {
  config.Validate();
  const Eigen::Index num_units = model.NumUnits();
  const int threads = config.deterministic ? 1 : config.num_threads;

  TrainResult result;
  std::vector<Utterance> usable;
  for (auto &u : utterances) {
    CheckLabels(u.labels, num_units);
    if (u.frames.cols() != model.encoder.config.input_dim)
      Fail(ErrorCode::kDimensionMismatch, "frame dimension does not match the encoder");
    if (u.frames.rows() < std::max(1, MinFramesForLabels(u.labels))) {
      ++result.report.skipped;
      continue;
    }
    usable.push_back(std::move(u));
  }
  if (usable.empty()) Fail(ErrorCode::kEmptyCorpus, "no usable training utterances");

  std::vector<ParamView> views = model.Params();
  std::vector<bool> active;
  for (const auto &v : views) {
    active.push_back(!config.IsFrozen(v.name));
    if (!active.back()) result.report.frozen.push_back(v.name);
  }
  for (const auto &f : config.freeze) {
    const bool matched = std::any_of(views.begin(), views.end(), [&](const ParamView &v) {
      return v.name == f || v.name.rfind(f + ".", 0) == 0;
    });
    if (!matched) Fail(ErrorCode::kInvalidConfig, "freeze entry '" + f + "' matches nothing");
  }

  // Dev split: a seeded shuffle, the tail becomes dev.
  std::vector<size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 split_rng(Mix(config.seed, 0x5eed));
  std::shuffle(order.begin(), order.end(), split_rng);
  size_t num_dev = 0;
  if (usable.size() >= 2 && config.dev_fraction > 0.0)
    num_dev = std::clamp<size_t>(
        static_cast<size_t>(std::lround(config.dev_fraction * static_cast<double>(usable.size()))),
        1, usable.size() - 1);
  std::vector<Utterance> train, dev;
  for (size_t i = 0; i < order.size(); ++i)
    (i < order.size() - num_dev ? train : dev).push_back(usable[order[i]]);
  const std::vector<Utterance> &monitor = dev.empty() ? train : dev;

  std::optional<PhoneLm> lm;
  std::optional<DenominatorGraph> graph;
  if (config.loss == LossKind::kCtcCrf) {
    std::vector<LabelSequence> labels;
    for (const auto &u : train) labels.push_back(u.labels);
    lm = PhoneLm::Train(labels, config.lm_order, config.lm_smoothing,
                        static_cast<int>(num_units) - 1);
    graph.emplace(static_cast<int>(num_units), &*lm);
  }
  const DenominatorGraph *g = graph ? &*graph : nullptr;

  EpochRecord first;
  first.epoch = 0;
  first.train_loss = MeanNll(model, train, config.loss, g, threads);
  first.dev_loss = dev.empty() ? first.train_loss : MeanNll(model, dev, config.loss, g, threads);
  first.dev_per = PhoneErrorRate(model, monitor);
  first.lr = config.initial_lr;
  result.report.epochs.push_back(first);

  double best = first.dev_loss;
  int bad_epochs = 0, decays = 0;
  result.report.stop_reason = "max_epochs";
  std::vector<size_t> train_order(train.size());
  std::iota(train_order.begin(), train_order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const double lr = config.initial_lr * std::pow(config.plateau_factor, decays);
    if (lr < config.lr_floor * (1.0 - 1e-9)) {
      result.report.stop_reason = "lr_floor";
      break;
    }
    std::mt19937_64 rng(Mix(config.seed, static_cast<uint64_t>(epoch)));
    std::shuffle(train_order.begin(), train_order.end(), rng);

    double loss_sum = 0.0;
    for (size_t start = 0; start < train_order.size();
         start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(train_order.size(), start + static_cast<size_t>(config.batch_size));
      const size_t count = end - start;
      const Matrix embeddings = model.Embeddings();
      std::vector<UttGrad> slots(count);
      ParallelFor(count, threads, [&](size_t i) {
        const size_t idx = train_order[start + i];
        slots[i] = ComputeUttGrad(model, embeddings, train[idx], config.loss, g, true,
                                  Mix(Mix(config.seed, static_cast<uint64_t>(epoch)), idx));
      });

      // Fixed-order reduction keeps runs bit-identical for any thread count.
      std::vector<Matrix> enc_grads = std::move(slots[0].encoder);
      Matrix emb_grad = std::move(slots[0].embeddings);
      loss_sum += slots[0].nll;
      for (size_t i = 1; i < count; ++i) {
        for (size_t k = 0; k < enc_grads.size(); ++k) enc_grads[k] += slots[i].encoder[k];
        emb_grad += slots[i].embeddings;
        loss_sum += slots[i].nll;
      }
      const double scale = 1.0 / static_cast<double>(count);
      std::vector<Matrix> grads;
      for (auto &m : enc_grads) grads.push_back(m * scale);
      for (auto &m : HeadBackward(model.head, model.phono, emb_grad * scale))
        grads.push_back(std::move(m));

      double sq = 0.0;
      for (size_t k = 0; k < grads.size(); ++k)
        if (active[k]) sq += grads[k].squaredNorm();
      const double norm = std::sqrt(sq);
      if (norm > config.clip_norm)
        for (auto &m : grads) m *= config.clip_norm / norm;

      AdamStep(views, grads, result.adam, lr, active);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(train.size());
    rec.dev_loss = MeanNll(model, monitor, config.loss, g, threads);
    rec.dev_per = PhoneErrorRate(model, monitor);
    result.report.epochs.push_back(rec);

    if (rec.dev_loss < best - config.min_improvement) {
      best = rec.dev_loss;
      bad_epochs = 0;
    } else if (++bad_epochs >= config.patience) {
      ++decays;
      bad_epochs = 0;
    }
  }

  result.report.checksum = model.Checksum();
  result.model = std::move(model);
  return result;
}

TrainResult TrainMultilingual(std::span<const Corpus> corpora, const UniversalPhoneSet &set,
                              const Matrix &phono, const TrainConfig &config) {
  config.Validate();
  if (corpora.empty()) Fail(ErrorCode::kEmptyCorpus, "no training corpora");
  const auto num_units = static_cast<Eigen::Index>(set.NumUnits());
  if (phono.rows() != num_units || phono.cols() != kPhonoDim)
    Fail(ErrorCode::kDimensionMismatch, "P must be (units x 51)");
  Corpus merged = MergeCorpora(corpora, set.Units());
  if (merged.utterances.empty()) Fail(ErrorCode::kEmptyCorpus, "training corpora are empty");

  std::mt19937_64 rng(config.seed);
  AcousticModel model;
  model.units = set.Units();
  model.phono = phono;
  model.encoder = EncoderParams::Init(config.encoder, rng);
  model.head = InitHead(config.head, num_units, config.encoder.output_dim, config.head_options, rng);
  return RunTraining(std::move(model), std::move(merged.utterances), config);
}

TrainResult Finetune(const AcousticModel &model, const Corpus &corpus, const TrainConfig &config) {
  if (corpus.utterances.empty()) Fail(ErrorCode::kEmptyCorpus, "finetuning corpus is empty");
  Corpus mapped = RemapCorpus(corpus, model.units);
  return RunTraining(model, std::move(mapped.utterances), config);
}

namespace {

struct Block {
  std::string name;
  Matrix value;
};

Matrix AsColumn(const Vector &v) { return v; }

std::vector<Block> HeadBlocks(const EmbeddingHead &head) {
  std::vector<Block> b;
  if (auto *f = std::get_if<FlatHead>(&head)) {
    b.push_back({"head.table", f->table});
  } else if (auto *l = std::get_if<LinearHead>(&head)) {
    b.push_back({"head.weight", l->weight});
    if (l->bias) b.push_back({"head.bias", AsColumn(*l->bias)});
  } else {
    const auto &n = std::get<NonlinearHead>(head);
    b.push_back({"head.hidden_weight", n.hidden_weight});
    b.push_back({"head.output_weight", n.output_weight});
    if (n.hidden_bias) b.push_back({"head.hidden_bias", AsColumn(*n.hidden_bias)});
    if (n.output_bias) b.push_back({"head.output_bias", AsColumn(*n.output_bias)});
  }
  return b;
}

Activation HeadActivation(const EmbeddingHead &head) {
  if (auto *n = std::get_if<NonlinearHead>(&head)) return n->activation;
  return Activation::kIdentity;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  const AcousticModel &m = ckpt.model;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) Fail(ErrorCode::kIoFailure, "cannot write " + path);
  os.write("JAPK", 4);
  binio::WriteU32(os, 1);
  binio::WriteString(os, ckpt.config_json);
  binio::WriteU32(os, static_cast<uint32_t>(m.units.size()));
  for (const auto &u : m.units) binio::WriteString(os, u);
  binio::WriteMatrix(os, m.phono);

  const EncoderConfig &ec = m.encoder.config;
  binio::WriteI32(os, ec.input_dim);
  binio::WriteI32(os, ec.context);
  binio::WriteU32(os, static_cast<uint32_t>(ec.hidden_dims.size()));
  for (int h : ec.hidden_dims) binio::WriteI32(os, h);
  binio::WriteI32(os, ec.output_dim);
  binio::WriteU32(os, static_cast<uint32_t>(ec.activation));
  binio::WriteU32(os, ec.recurrent ? 1 : 0);
  binio::WriteF64(os, ec.dropout);

  binio::WriteU32(os, static_cast<uint32_t>(m.head_kind()));
  binio::WriteU32(os, static_cast<uint32_t>(HeadActivation(m.head)));
  std::vector<Block> blocks;
  for (size_t l = 0; l < m.encoder.weights.size(); ++l) {
    blocks.push_back({"encoder.weight_" + std::to_string(l), m.encoder.weights[l]});
    blocks.push_back({"encoder.bias_" + std::to_string(l), AsColumn(m.encoder.biases[l])});
  }
  if (ec.recurrent) blocks.push_back({"encoder.recurrent", m.encoder.recurrent_weight});
  for (auto &b : HeadBlocks(m.head)) blocks.push_back(std::move(b));
  binio::WriteU32(os, static_cast<uint32_t>(blocks.size()));
  for (const auto &b : blocks) {
    binio::WriteString(os, b.name);
    binio::WriteMatrix(os, b.value);
  }

  binio::WriteU64(os, ckpt.adam.step);
  binio::WriteF64(os, ckpt.adam.beta1);
  binio::WriteF64(os, ckpt.adam.beta2);
  binio::WriteF64(os, ckpt.adam.eps);
  binio::WriteU32(os, static_cast<uint32_t>(ckpt.adam.m.size()));
  for (size_t i = 0; i < ckpt.adam.m.size(); ++i) {
    binio::WriteMatrix(os, AsColumn(ckpt.adam.m[i]));
    binio::WriteMatrix(os, AsColumn(ckpt.adam.v[i]));
  }
  binio::WriteU32(os, static_cast<uint32_t>(ckpt.epoch));
  os.flush();
  if (!os) Fail(ErrorCode::kIoFailure, "write failed for " + path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "JAPK") Fail(ErrorCode::kCorruptFile, path + ": bad magic");
  if (binio::ReadU32(is) != 1) Fail(ErrorCode::kCorruptFile, path + ": unsupported version");

  Checkpoint ck;
  ck.config_json = binio::ReadString(is);
  AcousticModel &m = ck.model;
  const uint32_t n = binio::ReadU32(is);
  for (uint32_t i = 0; i < n; ++i) m.units.push_back(binio::ReadString(is));
  m.phono = binio::ReadMatrix(is);

  EncoderConfig ec;
  ec.input_dim = binio::ReadI32(is);
  ec.context = binio::ReadI32(is);
  ec.hidden_dims.resize(binio::ReadU32(is));
  for (int &h : ec.hidden_dims) h = binio::ReadI32(is);
  ec.output_dim = binio::ReadI32(is);
  const uint32_t enc_act = binio::ReadU32(is);
  if (enc_act > static_cast<uint32_t>(Activation::kIdentity))
    Fail(ErrorCode::kCorruptFile, path + ": bad activation");
  ec.activation = static_cast<Activation>(enc_act);
  ec.recurrent = binio::ReadU32(is) != 0;
  ec.dropout = binio::ReadF64(is);
  try {
    m.encoder = EncoderParams::Zeros(ec);
  } catch (const Error &e) {
    Fail(ErrorCode::kCorruptFile, path + ": " + e.what());
  }

  const uint32_t kind = binio::ReadU32(is);
  const uint32_t head_act = binio::ReadU32(is);
  if (kind > static_cast<uint32_t>(HeadKind::kNonlinear) ||
      head_act > static_cast<uint32_t>(Activation::kIdentity))
    Fail(ErrorCode::kCorruptFile, path + ": bad head header");

  std::map<std::string, Matrix> blocks;
  const uint32_t num_blocks = binio::ReadU32(is);
  for (uint32_t i = 0; i < num_blocks; ++i) {
    std::string name = binio::ReadString(is);
    blocks[name] = binio::ReadMatrix(is);
  }
  auto take = [&](const std::string &name) -> Matrix {
    auto it = blocks.find(name);
    if (it == blocks.end()) Fail(ErrorCode::kCorruptFile, path + ": missing block " + name);
    return it->second;
  };
  auto maybe = [&](const std::string &name) -> std::optional<Vector> {
    auto it = blocks.find(name);
    if (it == blocks.end()) return std::nullopt;
    return Vector(Eigen::Map<const Vector>(it->second.data(), it->second.size()));
  };

  switch (static_cast<HeadKind>(kind)) {
    case HeadKind::kFlat: m.head = FlatHead{take("head.table")}; break;
    case HeadKind::kLinear: m.head = LinearHead{take("head.weight"), maybe("head.bias")}; break;
    case HeadKind::kNonlinear:
      m.head = NonlinearHead{take("head.hidden_weight"), take("head.output_weight"),
                             static_cast<Activation>(head_act), maybe("head.hidden_bias"),
                             maybe("head.output_bias")};
      break;
  }
  auto fill = [&](const std::string &name, auto &dst) {
    const Matrix b = take(name);
    if (b.rows() != dst.rows() || b.cols() != dst.cols())
      Fail(ErrorCode::kCorruptFile, path + ": wrong shape for " + name);
    dst = b;
  };
  for (size_t l = 0; l < m.encoder.weights.size(); ++l) {
    fill("encoder.weight_" + std::to_string(l), m.encoder.weights[l]);
    fill("encoder.bias_" + std::to_string(l), m.encoder.biases[l]);
  }
  if (ec.recurrent) fill("encoder.recurrent", m.encoder.recurrent_weight);
  if (m.phono.rows() != m.NumUnits())
    Fail(ErrorCode::kCorruptFile, path + ": P rows do not match the unit list");

  ck.adam.step = binio::ReadU64(is);
  ck.adam.beta1 = binio::ReadF64(is);
  ck.adam.beta2 = binio::ReadF64(is);
  ck.adam.eps = binio::ReadF64(is);
  const uint32_t k = binio::ReadU32(is);
  for (uint32_t i = 0; i < k; ++i) {
    const Matrix mm = binio::ReadMatrix(is);
    const Matrix vv = binio::ReadMatrix(is);
    ck.adam.m.emplace_back(Eigen::Map<const Vector>(mm.data(), mm.size()));
    ck.adam.v.emplace_back(Eigen::Map<const Vector>(vv.data(), vv.size()));
  }
  ck.epoch = static_cast<int>(binio::ReadU32(is));
  return ck;
}

}  // namespace joinap
