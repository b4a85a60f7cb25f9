// embedding-head.cc

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

#include "joinap/embedding-head.h"

#include <string>

#include "joinap/phono-features.h"

namespace joinap {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckPhono(const Matrix &phono) {
  if (phono.cols() != kPhonoDim)
    Fail(ErrorCode::kDimensionMismatch,
         "phonological matrix has " + std::to_string(phono.cols()) + " columns, expected 51");
}

uint64_t DigestMatrix(const Matrix &m) {
  Fnv1a h;
  h.Update(std::span<const double>(m.data(), static_cast<size_t>(m.size())));
  return h.Digest();
}

ParamView View(const std::string &name, Matrix &m) { return {name, m.data(), m.size()}; }
ParamView View(const std::string &name, Vector &v) { return {name, v.data(), v.size()}; }

}  // namespace

std::string_view HeadKindName(HeadKind kind) {
  switch (kind) {
    case HeadKind::kFlat: return "flat";
    case HeadKind::kLinear: return "linear";
    case HeadKind::kNonlinear: return "nonlinear";
  }
  return "?";
}

HeadKind ParseHeadKind(std::string_view name) {
  if (name == "flat") return HeadKind::kFlat;
  if (name == "linear") return HeadKind::kLinear;
  if (name == "nonlinear") return HeadKind::kNonlinear;
  Fail(ErrorCode::kInvalidConfig, "unknown head '" + std::string(name) + "'");
}

HeadKind KindOf(const EmbeddingHead &head) {
  return std::visit(Overloaded{[](const FlatHead &) { return HeadKind::kFlat; },
                               [](const LinearHead &) { return HeadKind::kLinear; },
                               [](const NonlinearHead &) { return HeadKind::kNonlinear; }},
                    head);
}

Eigen::Index EmbeddingDim(const EmbeddingHead &head) {
  return std::visit(
      Overloaded{[](const FlatHead &h) { return h.table.cols(); },
                 [](const LinearHead &h) { return h.weight.rows(); },
                 [](const NonlinearHead &h) { return h.output_weight.rows(); }},
      head);
}

EmbeddingHead InitHead(HeadKind kind, Eigen::Index num_units, Eigen::Index embed_dim,
                       const HeadOptions &opts, std::mt19937_64 &rng) {
  if (embed_dim < 1) Fail(ErrorCode::kInvalidConfig, "embedding dim must be >= 1");
  switch (kind) {
    case HeadKind::kFlat: {
      if (num_units < 1) Fail(ErrorCode::kInvalidConfig, "flat head needs units");
      // Treated as the H -> N output layer for the fan computation.
      return FlatHead{GlorotUniform(num_units, embed_dim, rng)};
    }
    case HeadKind::kLinear: {
      LinearHead h{GlorotUniform(embed_dim, kPhonoDim, rng), std::nullopt};
      if (opts.use_bias) h.bias = Vector::Zero(embed_dim);
      return h;
    }
    case HeadKind::kNonlinear: {
      if (opts.hidden_dim < 1) Fail(ErrorCode::kInvalidConfig, "hidden dim must be >= 1");
      NonlinearHead h;
      h.hidden_weight = GlorotUniform(opts.hidden_dim, kPhonoDim, rng);
      h.output_weight = GlorotUniform(embed_dim, opts.hidden_dim, rng);
      h.activation = opts.activation;
      if (opts.use_bias) {
        h.hidden_bias = Vector::Zero(opts.hidden_dim);
        h.output_bias = Vector::Zero(embed_dim);
      }
      return h;
    }
  }
  Fail(ErrorCode::kInvalidConfig, "bad head kind");
}

PhoneEmbeddingMatrix ComputeEmbeddings(const EmbeddingHead &head, const Matrix &phono) {
  return std::visit(
      Overloaded{
          [&](const FlatHead &h) {
            if (phono.rows() != 0 && phono.rows() != h.table.rows())
              Fail(ErrorCode::kDimensionMismatch,
                   "flat head has " + std::to_string(h.table.rows()) + " rows, P has " +
                       std::to_string(phono.rows()));
            return PhoneEmbeddingMatrix{h.table, HeadKind::kFlat, 0};
          },
          [&](const LinearHead &h) {
            CheckPhono(phono);
            Matrix e = phono * h.weight.transpose();
            if (h.bias) e.rowwise() += h.bias->transpose();
            return PhoneEmbeddingMatrix{std::move(e), HeadKind::kLinear, DigestMatrix(phono)};
          },
          [&](const NonlinearHead &h) {
            CheckPhono(phono);
            Matrix pre = phono * h.hidden_weight.transpose();
            if (h.hidden_bias) pre.rowwise() += h.hidden_bias->transpose();
            Matrix e = Activate(h.activation, pre) * h.output_weight.transpose();
            if (h.output_bias) e.rowwise() += h.output_bias->transpose();
            return PhoneEmbeddingMatrix{std::move(e), HeadKind::kNonlinear, DigestMatrix(phono)};
          }},
      head);
}

Matrix Logits(const Matrix &embeddings, const Matrix &hidden) {
  if (embeddings.cols() != hidden.cols())
    Fail(ErrorCode::kDimensionMismatch,
         "embedding width " + std::to_string(embeddings.cols()) + " vs hidden width " +
             std::to_string(hidden.cols()));
  return hidden * embeddings.transpose();
}

Matrix LogPosteriors(const Matrix &logits) {
  if (!logits.allFinite()) Fail(ErrorCode::kNonFiniteInput, "logits contain inf/nan");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

Matrix Posteriors(const Matrix &logits) {
  if (!logits.allFinite()) Fail(ErrorCode::kNonFiniteInput, "logits contain inf/nan");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(t).array() - m).exp();
    out.row(t) = e / e.sum();
  }
  return out;
}

std::string_view ExtensionModeName(ExtensionMode mode) {
  switch (mode) {
    case ExtensionMode::kPhonology: return "phonology";
    case ExtensionMode::kRandom: return "random";
    case ExtensionMode::kMeanOfSeen: return "mean";
  }
  return "?";
}

ExtensionMode ParseExtensionMode(std::string_view name) {
  if (name == "phonology") return ExtensionMode::kPhonology;
  if (name == "random") return ExtensionMode::kRandom;
  if (name == "mean") return ExtensionMode::kMeanOfSeen;
  Fail(ErrorCode::kInvalidConfig, "unknown extension mode '" + std::string(name) + "'");
}

Matrix ExtendInventory(const EmbeddingHead &head, const Matrix &new_phono,
                       const ExtensionOptions &opts) {
  const HeadKind kind = KindOf(head);
  const bool joinap = kind != HeadKind::kFlat;
  if (joinap != (opts.mode == ExtensionMode::kPhonology))
    Fail(ErrorCode::kModeHeadMismatch,
         std::string(ExtensionModeName(opts.mode)) + " extension on " +
             std::string(HeadKindName(kind)) + " head");
  if (joinap) return ComputeEmbeddings(head, new_phono).embeddings;

  const Matrix &table = std::get<FlatHead>(head).table;
  const Eigen::Index rows = new_phono.rows();
  Matrix out(rows, table.cols());
  if (opts.mode == ExtensionMode::kRandom) {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> dist(0.0, opts.random_std);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = dist(rng);
    return out;
  }
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(table.cols());
  if (opts.seen_rows.empty()) {
    if (table.rows() == 0) Fail(ErrorCode::kDimensionMismatch, "no seen rows to average");
    mean = table.colwise().mean();
  } else {
    for (int r : opts.seen_rows) {
      if (r < 0 || r >= table.rows())
        Fail(ErrorCode::kDimensionMismatch, "seen row index out of range");
      mean += table.row(r);
    }
    mean /= static_cast<double>(opts.seen_rows.size());
  }
  out.rowwise() = mean;
  return out;
}

void AppendFlatRows(FlatHead &head, const Matrix &rows) {
  if (rows.cols() != head.table.cols())
    Fail(ErrorCode::kDimensionMismatch, "appended rows have wrong width");
  Matrix grown(head.table.rows() + rows.rows(), head.table.cols());
  grown << head.table, rows;
  head.table = std::move(grown);
}

std::vector<Matrix> HeadBackward(const EmbeddingHead &head, const Matrix &phono,
                                 const Matrix &grad_embeddings) {
  return std::visit(
      Overloaded{
          [&](const FlatHead &h) {
            if (grad_embeddings.rows() != h.table.rows() || grad_embeddings.cols() != h.table.cols())
              Fail(ErrorCode::kDimensionMismatch, "dE shape does not match flat table");
            return std::vector<Matrix>{grad_embeddings};
          },
          [&](const LinearHead &h) {
            CheckPhono(phono);
            if (grad_embeddings.rows() != phono.rows() || grad_embeddings.cols() != h.weight.rows())
              Fail(ErrorCode::kDimensionMismatch, "dE shape does not match P/A");
            std::vector<Matrix> g{grad_embeddings.transpose() * phono};
            if (h.bias) g.push_back(grad_embeddings.colwise().sum().transpose());
            return g;
          },
          [&](const NonlinearHead &h) {
            CheckPhono(phono);
            if (grad_embeddings.rows() != phono.rows() ||
                grad_embeddings.cols() != h.output_weight.rows())
              Fail(ErrorCode::kDimensionMismatch, "dE shape does not match P/A2");
            Matrix pre = phono * h.hidden_weight.transpose();
            if (h.hidden_bias) pre.rowwise() += h.hidden_bias->transpose();
            Matrix act = Activate(h.activation, pre);
            Matrix grad_act = grad_embeddings * h.output_weight;  // N x Dh
            Matrix grad_pre =
                grad_act.cwiseProduct(ActivationDerivative(h.activation, pre, act));
            std::vector<Matrix> g;
            g.push_back(grad_pre.transpose() * phono);            // A1
            g.push_back(grad_embeddings.transpose() * act);       // A2
            if (h.hidden_bias) g.push_back(grad_pre.colwise().sum().transpose());
            if (h.output_bias) g.push_back(grad_embeddings.colwise().sum().transpose());
            return g;
          }},
      head);
}

std::vector<ParamView> HeadParams(EmbeddingHead &head) {
  return std::visit(Overloaded{[](FlatHead &h) {
                                 return std::vector<ParamView>{View("head.table", h.table)};
                               },
                               [](LinearHead &h) {
                                 std::vector<ParamView> v{View("head.weight", h.weight)};
                                 if (h.bias) v.push_back(View("head.bias", *h.bias));
                                 return v;
                               },
                               [](NonlinearHead &h) {
                                 std::vector<ParamView> v{
                                     View("head.hidden_weight", h.hidden_weight),
                                     View("head.output_weight", h.output_weight)};
                                 if (h.hidden_bias)
                                   v.push_back(View("head.hidden_bias", *h.hidden_bias));
                                 if (h.output_bias)
                                   v.push_back(View("head.output_bias", *h.output_bias));
                                 return v;
                               }},
                    head);
}

uint64_t HeadChecksum(const EmbeddingHead &head) {
  auto params = HeadParams(const_cast<EmbeddingHead &>(head));
  return ChecksumParams(params);
}

}  // namespace joinap
