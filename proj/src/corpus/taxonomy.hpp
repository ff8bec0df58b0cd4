// Copyright 2026 The smsie Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace smsie::corpus {

// Major classes in model output order.
enum class Major : std::uint8_t { kInfo, kReminder, kOffer, kTransaction, kOtp };

inline constexpr int kMajorCount = 5;
inline constexpr int kReminderSubCount = 8;
inline constexpr int kOfferSubCount = 7;
inline constexpr int kLeafCount = 18;

inline constexpr std::array<std::string_view, kMajorCount> kMajorNames = {
    "Info", "Reminder", "Offer", "Transaction", "Otp"};
inline constexpr std::array<std::string_view, kReminderSubCount> kReminderSubNames = {
    "Appointment", "Movie", "Bus", "Train", "Flight", "Bill", "Delivery", "Others"};
inline constexpr std::array<std::string_view, kOfferSubCount> kOfferSubNames = {
    "Flight", "Shopping", "Cab", "Food", "Hotel", "Movie", "Others"};

bool has_subclasses(Major major);
int sub_count(Major major);  // 0 for majors without a second level

// Two-level label. The sub index is present iff the major is Reminder or
// Offer; it indexes kReminderSubNames / kOfferSubNames.
class TaxonomyLabel {
 public:
  TaxonomyLabel() = default;

  // Throws Error(kInvalidArgument) when the sub presence rule is violated.
  static TaxonomyLabel make(Major major, std::optional<int> sub = std::nullopt);

  // Leaf order: Info, Transaction, Otp, Reminder_* (8), Offer_* (7).
  static TaxonomyLabel from_leaf(int leaf_index);

  // Parses "Info", "Otp", "Reminder_Bill", ...; throws Error(kData)
  // "unknown label: <s>" otherwise.
  static TaxonomyLabel parse(std::string_view s);

  Major major() const { return major_; }
  std::optional<int> sub() const { return sub_; }
  int leaf() const;
  std::string name() const;

  friend bool operator==(const TaxonomyLabel&, const TaxonomyLabel&) = default;

 private:
  Major major_ = Major::kInfo;
  std::optional<int> sub_;
};

std::string_view major_name(Major m);
std::optional<Major> parse_major(std::string_view s);

}  // namespace smsie::corpus
