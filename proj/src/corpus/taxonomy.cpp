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

#include "corpus/taxonomy.hpp"

#include "common/error.hpp"

namespace smsie::corpus {

bool has_subclasses(Major major) {
  return major == Major::kReminder || major == Major::kOffer;
}

int sub_count(Major major) {
  switch (major) {
    case Major::kReminder: return kReminderSubCount;
    case Major::kOffer: return kOfferSubCount;
    default: return 0;
  }
}

std::string_view major_name(Major m) { return kMajorNames[static_cast<int>(m)]; }

std::optional<Major> parse_major(std::string_view s) {
  for (int i = 0; i < kMajorCount; ++i) {
    if (kMajorNames[i] == s) return static_cast<Major>(i);
  }
  return std::nullopt;
}

TaxonomyLabel TaxonomyLabel::make(Major major, std::optional<int> sub) {
  const int n = sub_count(major);
  if (n == 0 && sub) {
    fail(ErrorKind::kInvalidArgument,
         std::string(major_name(major)) + " has no sub classes");
  }
  if (n > 0 && (!sub || *sub < 0 || *sub >= n)) {
    fail(ErrorKind::kInvalidArgument,
         std::string(major_name(major)) + " requires a valid sub class");
  }
  TaxonomyLabel l;
  l.major_ = major;
  l.sub_ = sub;
  return l;
}

TaxonomyLabel TaxonomyLabel::from_leaf(int leaf_index) {
  if (leaf_index < 0 || leaf_index >= kLeafCount) {
    fail(ErrorKind::kInvalidArgument, "leaf index out of range");
  }
  if (leaf_index == 0) return make(Major::kInfo);
  if (leaf_index == 1) return make(Major::kTransaction);
  if (leaf_index == 2) return make(Major::kOtp);
  if (leaf_index < 3 + kReminderSubCount) return make(Major::kReminder, leaf_index - 3);
  return make(Major::kOffer, leaf_index - 3 - kReminderSubCount);
}

int TaxonomyLabel::leaf() const {
  switch (major_) {
    case Major::kInfo: return 0;
    case Major::kTransaction: return 1;
    case Major::kOtp: return 2;
    case Major::kReminder: return 3 + *sub_;
    case Major::kOffer: return 3 + kReminderSubCount + *sub_;
  }
  return 0;
}

std::string TaxonomyLabel::name() const {
  std::string out(major_name(major_));
  if (major_ == Major::kReminder) {
    out += '_';
    out += kReminderSubNames[*sub_];
  } else if (major_ == Major::kOffer) {
    out += '_';
    out += kOfferSubNames[*sub_];
  }
  return out;
}

TaxonomyLabel TaxonomyLabel::parse(std::string_view s) {
  auto us = s.find('_');
  auto head = s.substr(0, us);
  auto major = parse_major(head);
  if (major) {
    if (us == std::string_view::npos && !has_subclasses(*major)) return make(*major);
    if (us != std::string_view::npos && has_subclasses(*major)) {
      auto tail = s.substr(us + 1);
      if (*major == Major::kReminder) {
        for (int i = 0; i < kReminderSubCount; ++i)
          if (kReminderSubNames[i] == tail) return make(*major, i);
      } else {
        for (int i = 0; i < kOfferSubCount; ++i)
          if (kOfferSubNames[i] == tail) return make(*major, i);
      }
    }
  }
  fail(ErrorKind::kData, "unknown label: " + std::string(s));
}

}  // namespace smsie::corpus
