// joinap/common.h

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

#ifndef JOINAP_COMMON_H_
#define JOINAP_COMMON_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace joinap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  kMalformedRow,
  kUnknownMark,
  kDuplicatePhone,
  kWrongFeatureCount,
  kFeatureOrderMismatch,
  kUnknownPhone,
  kDuplicateLanguageId,
  kDimensionMismatch,
  kNonFiniteInput,
  kModeHeadMismatch,
  kStaleCache,
  kEmptyResult,
  kInfeasibleLength,
  kEmptyCorpus,
  kShapeMismatch,
  kInventoryMismatch,
  kIoFailure,
  kInvalidConfig,
  kCorruptFile,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this type; the code identifies
// the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string &what);

bool AllFinite(const Matrix &m);

// Writable view over one parameter block, used by the optimizer and by
// checkpointing. Gradients are returned as matrices with the same element
// count and column-major layout.
struct ParamView {
  std::string name;
  double *data;
  Eigen::Index size;
};

// FNV-1a over the raw bytes of the doubles; stable for a given platform.
class Fnv1a {
 public:
  void Update(const void *data, size_t bytes);
  void Update(std::span<const double> values);
  void Update(std::string_view s);
  uint64_t Digest() const { return state_; }

 private:
  uint64_t state_ = 14695981039346656037ull;
};

uint64_t ChecksumParams(std::span<const ParamView> params);
std::string HexDigest(uint64_t v);

// Little-endian binary helpers for the checkpoint and corpus containers.
namespace binio {
void WriteU32(std::ostream &os, uint32_t v);
void WriteU64(std::ostream &os, uint64_t v);
void WriteI32(std::ostream &os, int32_t v);
void WriteF64(std::ostream &os, double v);
void WriteString(std::ostream &os, std::string_view s);
void WriteMatrix(std::ostream &os, const Matrix &m);
uint32_t ReadU32(std::istream &is);
uint64_t ReadU64(std::istream &is);
int32_t ReadI32(std::istream &is);
double ReadF64(std::istream &is);
std::string ReadString(std::istream &is);
Matrix ReadMatrix(std::istream &is);
}  // namespace binio

std::string ReadTextFile(const std::string &path);

}  // namespace joinap

#endif  // JOINAP_COMMON_H_
