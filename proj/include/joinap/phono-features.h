// joinap/phono-features.h

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

#ifndef JOINAP_PHONO_FEATURES_H_
#define JOINAP_PHONO_FEATURES_H_

#include <array>
#include <bitset>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "joinap/common.h"

namespace joinap {

inline constexpr int kNumFeatures = 24;
inline constexpr int kNumFeatureBits = 2 * kNumFeatures;
inline constexpr int kNumSpecials = 3;
inline constexpr int kPhonoDim = kNumFeatureBits + kNumSpecials;  // 51

enum class FeatureValue : uint8_t { kPlus, kMinus, kZero };

using FeatureRow = std::array<FeatureValue, kNumFeatures>;

char FeatureMark(FeatureValue v);

// Order matters: Blank is unit 0 of every inventory.
enum class SpecialToken : int { kBlank = 0, kSpn = 1, kNsn = 2 };

inline constexpr std::array<SpecialToken, kNumSpecials> kAllSpecials = {
    SpecialToken::kBlank, SpecialToken::kSpn, SpecialToken::kNsn};

std::string_view SpecialSymbol(SpecialToken token);
std::optional<SpecialToken> ParseSpecialSymbol(std::string_view symbol);

// The fixed feature column order, syllabic ... hireg.
const std::array<std::string_view, kNumFeatures> &CanonicalFeatureNames();

// Phone -> 24 ternary marks. Phones are opaque UTF-8 strings.
class FeatureTable {
 public:
  // Tab-separated: header `phone` + 24 feature names, then one row per
  // phone with cells in {+,-,0}. Lines starting with '#' and blank lines
  // are skipped.
  static FeatureTable Parse(std::string_view text);
  static FeatureTable ReadFile(const std::string &path);

  bool Contains(std::string_view phone) const;
  const FeatureRow &Row(std::string_view phone) const;
  const std::vector<std::string> &Phones() const { return phones_; }
  const std::vector<std::string> &FeatureNames() const { return feature_names_; }
  size_t size() const { return phones_.size(); }

  // Pairs of phones whose 24 marks coincide; such phones share a vector.
  std::vector<std::pair<std::string, std::string>> IdenticalRows() const;

  void Add(const std::string &phone, const FeatureRow &row);

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::string> phones_;
  std::unordered_map<std::string, FeatureRow> rows_;
};

// 51-bit phonological vector: 24 [is_plus, is_minus] pairs then one-hot
// Blank/Spn/Nsn bits.
class PhonologicalVector {
 public:
  PhonologicalVector() = default;

  static PhonologicalVector FromFeatures(const FeatureRow &row);
  static PhonologicalVector FromSpecial(SpecialToken token);

  bool bit(int i) const { return bits_[static_cast<size_t>(i)]; }
  int FeaturePopcount() const;
  int SpecialPopcount() const;
  std::optional<SpecialToken> Special() const;

  // Inverse of FromFeatures; throws kMalformedRow on a `11` pair.
  FeatureRow DecodeFeatures() const;

  // 51 characters of '0'/'1', bit 0 first.
  std::string ToString() const;
  Eigen::RowVectorXd ToRow() const;

  bool operator==(const PhonologicalVector &o) const { return bits_ == o.bits_; }

 private:
  std::bitset<kPhonoDim> bits_;
};

PhonologicalVector EncodePhone(const FeatureTable &table, std::string_view phone);
PhonologicalVector EncodeSpecial(SpecialToken token);

// Rows: specials in the given order, then phones in the given order.
Matrix EncodeInventory(const FeatureTable &table,
                       std::span<const std::string> phones,
                       std::span<const SpecialToken> specials);

// Encodes a unit list in which specials appear by their symbol (<blk> etc).
Matrix EncodeUnits(const FeatureTable &table, std::span<const std::string> units);

}  // namespace joinap

#endif  // JOINAP_PHONO_FEATURES_H_
