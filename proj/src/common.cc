// common.cc

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

#include "joinap/common.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace joinap {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kUnknownMark: return "UnknownMark";
    case ErrorCode::kDuplicatePhone: return "DuplicatePhone";
    case ErrorCode::kWrongFeatureCount: return "WrongFeatureCount";
    case ErrorCode::kFeatureOrderMismatch: return "FeatureOrderMismatch";
    case ErrorCode::kUnknownPhone: return "UnknownPhone";
    case ErrorCode::kDuplicateLanguageId: return "DuplicateLanguageId";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kModeHeadMismatch: return "ModeHeadMismatch";
    case ErrorCode::kStaleCache: return "StaleCache";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kInfeasibleLength: return "InfeasibleLength";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInventoryMismatch: return "InventoryMismatch";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kCorruptFile: return "CorruptFile";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
      code_(code) {}

void Fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

bool AllFinite(const Matrix &m) { return m.allFinite(); }

void Fnv1a::Update(const void *data, size_t bytes) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < bytes; ++i) {
    state_ ^= p[i];
    state_ *= 1099511628211ull;
  }
}

void Fnv1a::Update(std::span<const double> values) {
  Update(values.data(), values.size_bytes());
}

void Fnv1a::Update(std::string_view s) { Update(s.data(), s.size()); }

uint64_t ChecksumParams(std::span<const ParamView> params) {
  Fnv1a h;
  for (const auto &p : params) {
    h.Update(p.name);
    h.Update(std::span<const double>(p.data, static_cast<size_t>(p.size)));
  }
  return h.Digest();
}

std::string HexDigest(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace binio {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

namespace {
void WriteRaw(std::ostream &os, const void *p, size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
  if (!os) Fail(ErrorCode::kIoFailure, "write failed");
}
void ReadRaw(std::istream &is, void *p, size_t n) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (!is) Fail(ErrorCode::kCorruptFile, "unexpected end of file");
}
}  // namespace

void WriteU32(std::ostream &os, uint32_t v) { WriteRaw(os, &v, sizeof v); }
void WriteU64(std::ostream &os, uint64_t v) { WriteRaw(os, &v, sizeof v); }
void WriteI32(std::ostream &os, int32_t v) { WriteRaw(os, &v, sizeof v); }
void WriteF64(std::ostream &os, double v) { WriteRaw(os, &v, sizeof v); }

void WriteString(std::ostream &os, std::string_view s) {
  WriteU32(os, static_cast<uint32_t>(s.size()));
  WriteRaw(os, s.data(), s.size());
}

void WriteMatrix(std::ostream &os, const Matrix &m) {
  WriteU32(os, static_cast<uint32_t>(m.rows()));
  WriteU32(os, static_cast<uint32_t>(m.cols()));
  // row-major on disk
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) WriteF64(os, m(r, c));
}

uint32_t ReadU32(std::istream &is) {
  uint32_t v;
  ReadRaw(is, &v, sizeof v);
  return v;
}
uint64_t ReadU64(std::istream &is) {
  uint64_t v;
  ReadRaw(is, &v, sizeof v);
  return v;
}
int32_t ReadI32(std::istream &is) {
  int32_t v;
  ReadRaw(is, &v, sizeof v);
  return v;
}
double ReadF64(std::istream &is) {
  double v;
  ReadRaw(is, &v, sizeof v);
  return v;
}

std::string ReadString(std::istream &is) {
  uint32_t n = ReadU32(is);
  if (n > (1u << 28)) Fail(ErrorCode::kCorruptFile, "string length out of range");
  std::string s(n, '\0');
  ReadRaw(is, s.data(), n);
  return s;
}

Matrix ReadMatrix(std::istream &is) {
  uint32_t rows = ReadU32(is), cols = ReadU32(is);
  if (static_cast<uint64_t>(rows) * cols > (1ull << 32))
    Fail(ErrorCode::kCorruptFile, "matrix size out of range");
  Matrix m(rows, cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) m(r, c) = ReadF64(is);
  return m;
}

}  // namespace binio

std::string ReadTextFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace joinap
