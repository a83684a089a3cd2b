// Copyright 2026 The gnslab Authors
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

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace gnslab {

/// Outcome of one named verification. Failed checks carry a witness.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::optional<double> worst_ratio;
  std::optional<double> residual;
  std::optional<std::string> witness;
  std::string note;
};

class Report {
 public:
  void add(CheckResult r) { checks_.push_back(std::move(r)); }
  void merge(const Report& other) {
    checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
  }

  bool all_passed() const {
    return std::all_of(checks_.begin(), checks_.end(),
                       [](const CheckResult& c) { return c.passed; });
  }
  bool empty() const { return checks_.empty(); }
  std::size_t size() const { return checks_.size(); }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks_)
      if (c.name == name) return &c;
    return nullptr;
  }
  bool passed(const std::string& name) const {
    const CheckResult* c = find(name);
    return c != nullptr && c->passed;
  }

  /// Stable ordering by name so output is independent of evaluation order.
  void sort() {
    std::stable_sort(checks_.begin(), checks_.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  }

  const std::vector<CheckResult>& checks() const { return checks_; }

 private:
  std::vector<CheckResult> checks_;
};

}  // namespace gnslab
