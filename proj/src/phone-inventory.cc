// phone-inventory.cc

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

#include "joinap/phone-inventory.h"

#include <algorithm>

#include "joinap/phono-features.h"
#include "json.hpp"

namespace joinap {

LanguageInventory LanguageInventory::FromJson(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kCorruptFile, std::string("inventory json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("language") || !j.contains("phones") ||
      !j["language"].is_string() || !j["phones"].is_array())
    Fail(ErrorCode::kCorruptFile, "inventory needs 'language' and 'phones'");
  LanguageInventory inv;
  inv.language_id = j["language"].get<std::string>();
  std::set<std::string> seen;
  for (const auto &p : j["phones"]) {
    if (!p.is_string()) Fail(ErrorCode::kCorruptFile, "phone entries must be strings");
    std::string phone = p.get<std::string>();
    if (ParseSpecialSymbol(phone))
      Fail(ErrorCode::kCorruptFile, "special symbol listed as phone: " + phone);
    if (!seen.insert(phone).second)
      Fail(ErrorCode::kDuplicatePhone, inv.language_id + ": " + phone);
    inv.phones.push_back(std::move(phone));
  }
  return inv;
}

LanguageInventory LanguageInventory::ReadFile(const std::string &path) {
  return FromJson(ReadTextFile(path));
}

std::string LanguageInventory::ToJson() const {
  nlohmann::json j;
  j["language"] = language_id;
  j["phones"] = phones;
  return j.dump();
}

UniversalPhoneSet UniversalPhoneSet::Merge(std::span<const LanguageInventory> inventories) {
  UniversalPhoneSet set;
  std::set<std::string> ids;
  for (const auto &inv : inventories) {
    if (!ids.insert(inv.language_id).second)
      Fail(ErrorCode::kDuplicateLanguageId, inv.language_id);
    for (const auto &p : inv.phones) set.membership_[p].insert(inv.language_id);
  }
  set.languages_.assign(ids.begin(), ids.end());
  for (SpecialToken t : kAllSpecials) set.units_.emplace_back(SpecialSymbol(t));
  // std::map<std::string> iterates in byte order, which is codepoint order
  // for UTF-8.
  for (const auto &[phone, langs] : set.membership_) set.units_.push_back(phone);
  for (size_t i = 0; i < set.units_.size(); ++i)
    set.index_.emplace(set.units_[i], static_cast<int>(i));
  return set;
}

std::vector<std::string> UniversalPhoneSet::Phones() const {
  return {units_.begin() + kNumSpecials, units_.end()};
}

std::optional<int> UniversalPhoneSet::IndexOf(const std::string &unit) const {
  auto it = index_.find(unit);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::set<std::string> &UniversalPhoneSet::Membership(const std::string &phone) const {
  auto it = membership_.find(phone);
  if (it == membership_.end()) Fail(ErrorCode::kUnknownPhone, phone);
  return it->second;
}

std::string UniversalPhoneSet::ToJson() const {
  nlohmann::ordered_json j;
  j["units"] = units_;
  j["languages"] = languages_;
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto &[phone, langs] : membership_)
    m[phone] = std::vector<std::string>(langs.begin(), langs.end());
  j["membership"] = m;
  return j.dump(2);
}

std::map<int, int> LanguageDegree(const UniversalPhoneSet &set) {
  std::map<int, int> hist;
  for (const auto &phone : set.Phones())
    ++hist[static_cast<int>(set.Membership(phone).size())];
  return hist;
}

PhonePartition UnseenPhones(const UniversalPhoneSet &set, const LanguageInventory &target) {
  PhonePartition out;
  for (const auto &p : target.phones)
    (set.Contains(p) ? out.seen : out.unseen).push_back(p);
  return out;
}

}  // namespace joinap
