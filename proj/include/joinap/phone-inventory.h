// joinap/phone-inventory.h

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

#ifndef JOINAP_PHONE_INVENTORY_H_
#define JOINAP_PHONE_INVENTORY_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "joinap/common.h"

namespace joinap {

struct LanguageInventory {
  std::string language_id;
  std::vector<std::string> phones;  // unique, in listing order

  // {"language": "...", "phones": ["a", "b", ...]}
  static LanguageInventory FromJson(std::string_view text);
  static LanguageInventory ReadFile(const std::string &path);
  std::string ToJson() const;
};

// Specials first (<blk>, <spn>, <nsn>), then the union of all member phones
// sorted by codepoint. The ordering fixes output-layer indices.
class UniversalPhoneSet {
 public:
  static UniversalPhoneSet Merge(std::span<const LanguageInventory> inventories);

  const std::vector<std::string> &Units() const { return units_; }
  size_t NumUnits() const { return units_.size(); }
  // Phone units only (no specials), in unit order.
  std::vector<std::string> Phones() const;
  const std::vector<std::string> &Languages() const { return languages_; }

  bool Contains(const std::string &unit) const { return index_.count(unit) > 0; }
  std::optional<int> IndexOf(const std::string &unit) const;
  // Throws kUnknownPhone for specials or absent phones.
  const std::set<std::string> &Membership(const std::string &phone) const;

  std::string ToJson() const;

 private:
  std::vector<std::string> units_;
  std::vector<std::string> languages_;
  std::unordered_map<std::string, int> index_;
  std::map<std::string, std::set<std::string>> membership_;
};

// degree -> number of phones shared by exactly that many languages.
std::map<int, int> LanguageDegree(const UniversalPhoneSet &set);

struct PhonePartition {
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
};

PhonePartition UnseenPhones(const UniversalPhoneSet &set, const LanguageInventory &target);

}  // namespace joinap

#endif  // JOINAP_PHONE_INVENTORY_H_
