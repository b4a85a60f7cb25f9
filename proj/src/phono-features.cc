// phono-features.cc

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

#include "joinap/phono-features.h"

#include <map>
#include <sstream>

namespace joinap {

namespace {

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
    if (i >= line.size()) break;
    size_t j = i;
    while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

FeatureValue ParseMark(const std::string &cell, int line_no) {
  if (cell == "+") return FeatureValue::kPlus;
  if (cell == "-") return FeatureValue::kMinus;
  if (cell == "0") return FeatureValue::kZero;
  Fail(ErrorCode::kUnknownMark,
       "line " + std::to_string(line_no) + ": cell '" + cell + "'");
}

}  // namespace

char FeatureMark(FeatureValue v) {
  switch (v) {
    case FeatureValue::kPlus: return '+';
    case FeatureValue::kMinus: return '-';
    case FeatureValue::kZero: return '0';
  }
  return '?';
}

std::string_view SpecialSymbol(SpecialToken token) {
  switch (token) {
    case SpecialToken::kBlank: return "<blk>";
    case SpecialToken::kSpn: return "<spn>";
    case SpecialToken::kNsn: return "<nsn>";
  }
  return "<?>";
}

std::optional<SpecialToken> ParseSpecialSymbol(std::string_view symbol) {
  for (SpecialToken t : kAllSpecials)
    if (SpecialSymbol(t) == symbol) return t;
  return std::nullopt;
}

const std::array<std::string_view, kNumFeatures> &CanonicalFeatureNames() {
  static const std::array<std::string_view, kNumFeatures> names = {
      "syllabic", "sonorant", "consonantal", "continuant",
      "delayed_release", "lateral", "nasal", "strident",
      "voice", "spread_glottis", "constricted_glottis", "anterior",
      "coronal", "distributed", "labial", "high",
      "low", "back", "round", "velaric",
      "tense", "long", "hitone", "hireg"};
  return names;
}

FeatureTable FeatureTable::Parse(std::string_view text) {
  FeatureTable table;
  bool have_header = false;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields = SplitFields(line);
    if (fields.empty()) continue;
    if (!have_header) {
      if (fields.front() != "phone")
        Fail(ErrorCode::kMalformedRow, "header must start with 'phone'");
      if (fields.size() != kNumFeatures + 1)
        Fail(ErrorCode::kWrongFeatureCount,
             "header has " + std::to_string(fields.size() - 1) +
                 " feature columns, expected 24");
      const auto &canon = CanonicalFeatureNames();
      for (int k = 0; k < kNumFeatures; ++k) {
        if (fields[k + 1] != canon[k])
          Fail(ErrorCode::kFeatureOrderMismatch,
               "column " + std::to_string(k + 1) + " is '" + fields[k + 1] +
                   "', expected '" + std::string(canon[k]) + "'");
      }
      table.feature_names_.assign(fields.begin() + 1, fields.end());
      have_header = true;
      continue;
    }
    if (fields.size() != kNumFeatures + 1)
      Fail(ErrorCode::kMalformedRow,
           "line " + std::to_string(line_no) + " has " +
               std::to_string(fields.size() - 1) + " cells");
    FeatureRow row;
    for (int k = 0; k < kNumFeatures; ++k) row[k] = ParseMark(fields[k + 1], line_no);
    if (table.Contains(fields[0]))
      Fail(ErrorCode::kDuplicatePhone,
           "line " + std::to_string(line_no) + ": '" + fields[0] + "'");
    table.Add(fields[0], row);
  }
  if (!have_header) Fail(ErrorCode::kWrongFeatureCount, "missing header line");
  return table;
}

FeatureTable FeatureTable::ReadFile(const std::string &path) {
  return Parse(ReadTextFile(path));
}

bool FeatureTable::Contains(std::string_view phone) const {
  return rows_.count(std::string(phone)) > 0;
}

const FeatureRow &FeatureTable::Row(std::string_view phone) const {
  auto it = rows_.find(std::string(phone));
  if (it == rows_.end())
    Fail(ErrorCode::kUnknownPhone, "'" + std::string(phone) + "' not in feature table");
  return it->second;
}

void FeatureTable::Add(const std::string &phone, const FeatureRow &row) {
  if (rows_.count(phone)) Fail(ErrorCode::kDuplicatePhone, phone);
  if (ParseSpecialSymbol(phone))
    Fail(ErrorCode::kMalformedRow, "special symbol used as phone: " + phone);
  if (feature_names_.empty())
    for (auto n : CanonicalFeatureNames()) feature_names_.emplace_back(n);
  phones_.push_back(phone);
  rows_.emplace(phone, row);
}

std::vector<std::pair<std::string, std::string>> FeatureTable::IdenticalRows() const {
  std::map<std::string, std::string> first_by_key;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &p : phones_) {
    std::string key;
    for (FeatureValue v : rows_.at(p)) key.push_back(FeatureMark(v));
    auto [it, inserted] = first_by_key.emplace(key, p);
    if (!inserted) out.emplace_back(it->second, p);
  }
  return out;
}

PhonologicalVector PhonologicalVector::FromFeatures(const FeatureRow &row) {
  PhonologicalVector v;
  for (int k = 0; k < kNumFeatures; ++k) {
    if (row[k] == FeatureValue::kPlus) v.bits_.set(2 * k);
    if (row[k] == FeatureValue::kMinus) v.bits_.set(2 * k + 1);
  }
  return v;
}

PhonologicalVector PhonologicalVector::FromSpecial(SpecialToken token) {
  PhonologicalVector v;
  v.bits_.set(kNumFeatureBits + static_cast<int>(token));
  return v;
}

int PhonologicalVector::FeaturePopcount() const {
  int n = 0;
  for (int i = 0; i < kNumFeatureBits; ++i) n += bits_[i];
  return n;
}

int PhonologicalVector::SpecialPopcount() const {
  int n = 0;
  for (int i = kNumFeatureBits; i < kPhonoDim; ++i) n += bits_[i];
  return n;
}

std::optional<SpecialToken> PhonologicalVector::Special() const {
  for (SpecialToken t : kAllSpecials)
    if (bits_[kNumFeatureBits + static_cast<int>(t)]) return t;
  return std::nullopt;
}

FeatureRow PhonologicalVector::DecodeFeatures() const {
  FeatureRow row;
  for (int k = 0; k < kNumFeatures; ++k) {
    bool plus = bits_[2 * k], minus = bits_[2 * k + 1];
    if (plus && minus)
      Fail(ErrorCode::kMalformedRow, "pair " + std::to_string(k) + " is 11");
    row[k] = plus ? FeatureValue::kPlus
                  : (minus ? FeatureValue::kMinus : FeatureValue::kZero);
  }
  return row;
}

std::string PhonologicalVector::ToString() const {
  std::string s(kPhonoDim, '0');
  for (int i = 0; i < kPhonoDim; ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

Eigen::RowVectorXd PhonologicalVector::ToRow() const {
  Eigen::RowVectorXd r(kPhonoDim);
  for (int i = 0; i < kPhonoDim; ++i) r[i] = bits_[i] ? 1.0 : 0.0;
  return r;
}

PhonologicalVector EncodePhone(const FeatureTable &table, std::string_view phone) {
  return PhonologicalVector::FromFeatures(table.Row(phone));
}

PhonologicalVector EncodeSpecial(SpecialToken token) {
  return PhonologicalVector::FromSpecial(token);
}

Matrix EncodeInventory(const FeatureTable &table,
                       std::span<const std::string> phones,
                       std::span<const SpecialToken> specials) {
  Matrix p(static_cast<Eigen::Index>(phones.size() + specials.size()), kPhonoDim);
  Eigen::Index r = 0;
  for (SpecialToken t : specials) p.row(r++) = EncodeSpecial(t).ToRow();
  for (const auto &ph : phones) p.row(r++) = EncodePhone(table, ph).ToRow();
  return p;
}

Matrix EncodeUnits(const FeatureTable &table, std::span<const std::string> units) {
  Matrix p(static_cast<Eigen::Index>(units.size()), kPhonoDim);
  for (size_t i = 0; i < units.size(); ++i) {
    auto special = ParseSpecialSymbol(units[i]);
    p.row(static_cast<Eigen::Index>(i)) =
        special ? EncodeSpecial(*special).ToRow() : EncodePhone(table, units[i]).ToRow();
  }
  return p;
}

}  // namespace joinap
