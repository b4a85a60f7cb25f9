// joinap/embedding-head.h

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

#ifndef JOINAP_EMBEDDING_HEAD_H_
#define JOINAP_EMBEDDING_HEAD_H_

#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "joinap/activation.h"
#include "joinap/common.h"

namespace joinap {

// The output layer of the acoustic model is a set of phone embeddings e_i;
// logits are z_{t,i} = e_i . h_t. The heads differ only in where e_i comes
// from:
//   flat:       e_i is a free row of a N x H table;
//   linear:     e_i = A p_i              (A is H x 51);
//   nonlinear:  e_i = A2 f(A1 p_i)       (A1 is Dh x 51, A2 is H x Dh);
// where p_i is the phonological vector of unit i. The JoinAP heads can
// therefore embed any phone that has a feature row, trained or not.

enum class HeadKind { kFlat, kLinear, kNonlinear };

std::string_view HeadKindName(HeadKind kind);
HeadKind ParseHeadKind(std::string_view name);

struct FlatHead {
  Matrix table;  // N x H
};

struct LinearHead {
  Matrix weight;              // H x 51
  std::optional<Vector> bias;  // H
};

struct NonlinearHead {
  Matrix hidden_weight;  // Dh x 51
  Matrix output_weight;  // H x Dh
  Activation activation = Activation::kSigmoid;
  std::optional<Vector> hidden_bias;  // Dh
  std::optional<Vector> output_bias;  // H
};

using EmbeddingHead = std::variant<FlatHead, LinearHead, NonlinearHead>;

HeadKind KindOf(const EmbeddingHead &head);
Eigen::Index EmbeddingDim(const EmbeddingHead &head);

struct HeadOptions {
  int hidden_dim = 512;
  Activation activation = Activation::kSigmoid;
  bool use_bias = false;
};

// Glorot-uniform weights, zero biases. num_units only matters for flat heads.
EmbeddingHead InitHead(HeadKind kind, Eigen::Index num_units, Eigen::Index embed_dim,
                       const HeadOptions &opts, std::mt19937_64 &rng);

struct PhoneEmbeddingMatrix {
  Matrix embeddings;  // N x H
  HeadKind head = HeadKind::kFlat;
  uint64_t phono_digest = 0;  // digest of the P matrix used (0 for flat)
};

// For flat heads `phono` is ignored except that its row count, when
// non-zero, must match the table.
PhoneEmbeddingMatrix ComputeEmbeddings(const EmbeddingHead &head, const Matrix &phono);

// Z = H_seq E^T, i.e. Z(t, i) = <E.row(i), H_seq.row(t)>.
Matrix Logits(const Matrix &embeddings, const Matrix &hidden);

// Row-wise softmax with max subtraction. Throws kNonFiniteInput.
Matrix Posteriors(const Matrix &logits);
Matrix LogPosteriors(const Matrix &logits);

enum class ExtensionMode { kPhonology, kRandom, kMeanOfSeen };

std::string_view ExtensionModeName(ExtensionMode mode);
ExtensionMode ParseExtensionMode(std::string_view name);

struct ExtensionOptions {
  ExtensionMode mode = ExtensionMode::kPhonology;
  uint64_t seed = 0;
  double random_std = 0.01;
  // Rows averaged by kMeanOfSeen; empty means every existing row.
  std::vector<int> seen_rows;
};

// Embedding rows for M new units. Never modifies the head.
Matrix ExtendInventory(const EmbeddingHead &head, const Matrix &new_phono,
                       const ExtensionOptions &opts);

// Appends rows to a flat head; they become ordinary trainable rows.
void AppendFlatRows(FlatHead &head, const Matrix &rows);

// Gradients in HeadParams() order given dL/dE.
std::vector<Matrix> HeadBackward(const EmbeddingHead &head, const Matrix &phono,
                                 const Matrix &grad_embeddings);

std::vector<ParamView> HeadParams(EmbeddingHead &head);
uint64_t HeadChecksum(const EmbeddingHead &head);

}  // namespace joinap

#endif  // JOINAP_EMBEDDING_HEAD_H_
