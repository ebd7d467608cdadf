// Copyright 2026 The onknap Authors
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

#ifndef ONKNAP_MULTI_INSTANCE_HPP
#define ONKNAP_MULTI_INSTANCE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "onknap/errors.hpp"

namespace onknap {

/// N knapsacks with capacities B_j; item t takes size s_{tj} in knapsack j.
/// A zero entry means the item cannot use that knapsack.
class MultiInstance {
 public:
  MultiInstance() = default;

  MultiInstance(std::vector<double> capacities, std::vector<std::vector<double>> items)
      : capacities_(std::move(capacities)), items_(std::move(items)) {
    if (capacities_.empty()) throw ArgumentError("need at least one knapsack");
    for (double b : capacities_) {
      if (!(b > 0.0)) throw ArgumentError("knapsack capacities must be positive");
    }
    for (std::size_t t = 0; t < items_.size(); ++t) {
      if (items_[t].size() != capacities_.size()) {
        throw ArgumentError("item " + std::to_string(t + 1) + " has the wrong number of sizes");
      }
      for (double s : items_[t]) {
        if (!(s >= 0.0 && s <= 1.0)) {
          throw ArgumentError("item " + std::to_string(t + 1) + " has a size outside [0, 1]");
        }
      }
    }
  }

  std::size_t knapsacks() const noexcept { return capacities_.size(); }
  std::size_t items() const noexcept { return items_.size(); }
  const std::vector<double>& capacities() const noexcept { return capacities_; }
  const std::vector<std::vector<double>>& sizes() const noexcept { return items_; }
  double size(std::size_t t, std::size_t j) const { return items_[t][j]; }

 private:
  std::vector<double> capacities_;
  std::vector<std::vector<double>> items_;
};

}  // namespace onknap

#endif  // ONKNAP_MULTI_INSTANCE_HPP
