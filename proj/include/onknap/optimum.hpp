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

// Offline optima: fractional OPT+ (truncation allowed), integer OPT, and the
// exhaustive multi-knapsack optimum.

#ifndef ONKNAP_OPTIMUM_HPP
#define ONKNAP_OPTIMUM_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/multi_instance.hpp"

namespace onknap {

enum class OptMethod : std::uint8_t { closed_form, dp, brute_force };

inline const char* to_string(OptMethod m) {
  switch (m) {
    case OptMethod::closed_form: return "closed_form";
    case OptMethod::dp: return "dp";
    case OptMethod::brute_force: return "brute_force";
  }
  return "?";
}

template <class Size>
struct OptResult {
  Size value{};
  std::vector<std::size_t> witness;  // accepted indices, ascending; empty for OPT+
  OptMethod method = OptMethod::closed_form;
};

inline constexpr std::size_t kMaxBruteForceItems = 24;
inline constexpr std::int64_t kMaxDpCapacity = 10'000'000;

/// OPT+ = min(total size, capacity).
template <class Size>
OptResult<Size> opt_plus(const ItemSequence<Size>& seq) {
  return {std::min(seq.total(), seq.capacity()), {}, OptMethod::closed_form};
}

/// Max subset sum within capacity by enumerating all 2^T subsets.
template <class Size>
OptResult<Size> opt_brute_force(const ItemSequence<Size>& seq) {
  const std::size_t n = seq.size();
  if (n > kMaxBruteForceItems) {
    throw SizeError("brute-force optimum limited to " + std::to_string(kMaxBruteForceItems) +
                    " items; use integer units for longer sequences");
  }
  // Depth-first include/exclude search; every partial sum is at most T additions
  // from zero, so fraction-mode rounding stays far below the fit slack.
  std::vector<Size> suffix(n + 1, Size{0});
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + seq[i];
  std::vector<bool> take(n, false);
  std::vector<bool> best_take(n, false);
  Size best{0};
  bool full = false;
  auto dfs = [&](auto&& self, std::size_t i, Size sum) -> void {
    if (full) return;
    if (sum > best) {
      best = sum;
      best_take = take;
      if (!SizeTraits<Size>::exceeds(seq.capacity(), best)) full = true;
    }
    if (i == n || !(sum + suffix[i] > best)) return;
    if (SizeTraits<Size>::fits(seq[i], seq.capacity() - sum)) {
      take[i] = true;
      self(self, i + 1, sum + seq[i]);
      take[i] = false;
    }
    self(self, i + 1, sum);
  };
  dfs(dfs, 0, Size{0});
  OptResult<Size> r{Size{0}, {}, OptMethod::brute_force};
  for (std::size_t i = 0; i < n; ++i) {
    if (best_take[i]) {
      r.witness.push_back(i);
      r.value += seq[i];
    }
  }
  return r;
}

/// Max subset sum for sequences with few distinct sizes (long runs of equal
/// items). Searches over how many copies of each distinct size to take.
template <class Size>
OptResult<Size> opt_grouped(const ItemSequence<Size>& seq) {
  struct Group {
    Size size;
    std::vector<std::size_t> indices;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!SizeTraits<Size>::fits(seq[i], seq.capacity())) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.size == seq[i]; });
    if (it == groups.end()) {
      groups.push_back({seq[i], {i}});
    } else {
      it->indices.push_back(i);
    }
  }
  if (groups.size() > kMaxBruteForceItems) {
    throw SizeError("grouped optimum limited to " + std::to_string(kMaxBruteForceItems) +
                    " distinct sizes");
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.size > b.size; });
  std::vector<std::size_t> take(groups.size(), 0);
  std::vector<std::size_t> best_take(groups.size(), 0);
  Size best{0};
  bool full = false;
  auto dfs = [&](auto&& self, std::size_t g, Size sum) -> void {
    if (full) return;
    if (sum > best) {
      best = sum;
      best_take = take;
      if (!SizeTraits<Size>::exceeds(seq.capacity(), best)) full = true;
    }
    if (g == groups.size()) return;
    const Size s = groups[g].size;
    std::size_t most = 0;
    Size acc = sum;
    while (most < groups[g].indices.size() && SizeTraits<Size>::fits(s, seq.capacity() - acc)) {
      acc += s;
      ++most;
    }
    for (std::size_t c = most + 1; c-- > 0;) {
      take[g] = c;
      Size with = sum;
      for (std::size_t k = 0; k < c; ++k) with += s;
      self(self, g + 1, with);
    }
    take[g] = 0;
  };
  dfs(dfs, 0, Size{0});
  OptResult<Size> r{Size{0}, {}, OptMethod::brute_force};
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t k = 0; k < best_take[g]; ++k) {
      r.witness.push_back(groups[g].indices[k]);
      r.value += groups[g].size;
    }
  }
  std::sort(r.witness.begin(), r.witness.end());
  return r;
}

/// Subset-sum DP over capacity units with witness reconstruction.
inline OptResult<std::int64_t> opt_dp(const UnitSequence& seq) {
  const std::int64_t cap = seq.capacity();
  if (cap > kMaxDpCapacity) throw SizeError("capacity exceeds the dynamic-programming limit");
  const auto width = static_cast<std::size_t>(cap) + 1;
  // from[c] = index of the item that first made sum c reachable, -1 if unreachable.
  std::vector<std::int32_t> from(width, -1);
  std::vector<bool> reach(width, false);
  reach[0] = true;
  std::int64_t best = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const std::int64_t s = seq[i];
    if (s > cap) continue;
    for (std::int64_t c = cap; c >= s; --c) {
      const auto uc = static_cast<std::size_t>(c);
      if (!reach[uc] && reach[uc - static_cast<std::size_t>(s)]) {
        reach[uc] = true;
        from[uc] = static_cast<std::int32_t>(i);
        best = std::max(best, c);
      }
    }
    if (best == cap) break;
  }
  OptResult<std::int64_t> r{best, {}, OptMethod::dp};
  for (std::int64_t c = best; c > 0;) {
    const auto i = static_cast<std::size_t>(from[static_cast<std::size_t>(c)]);
    r.witness.push_back(i);
    c -= seq[i];
  }
  std::sort(r.witness.begin(), r.witness.end());
  return r;
}

/// Integer OPT: DP in unit mode, brute force (T <= 24) in fraction mode.
template <class Size>
OptResult<Size> opt_integer(const ItemSequence<Size>& seq) {
  if constexpr (std::is_integral_v<Size>) {
    return opt_dp(seq);
  } else {
    return opt_brute_force(seq);
  }
}

struct MultiOptResult {
  double value = 0.0;
  std::vector<int> assignment;  // knapsack index per item, -1 = rejected
  OptMethod method = OptMethod::brute_force;
};

inline constexpr std::size_t kMaxMultiItems = 10;
inline constexpr std::size_t kMaxMultiKnapsacks = 5;

namespace detail {

struct MultiSearch {
  const MultiInstance& inst;
  std::vector<double> remaining;
  std::vector<int> current;
  double value = 0.0;
  MultiOptResult best;

  void run(std::size_t t) {
    if (t == inst.items()) {
      if (value > best.value) {
        best.value = value;
        best.assignment = current;
      }
      return;
    }
    current[t] = -1;
    run(t + 1);
    for (std::size_t j = 0; j < inst.knapsacks(); ++j) {
      const double s = inst.size(t, j);
      if (s > 0.0 && SizeTraits<double>::fits(s, remaining[j])) {
        remaining[j] -= s;
        value += s;
        current[t] = static_cast<int>(j);
        run(t + 1);
        value -= s;
        remaining[j] += s;
      }
    }
    current[t] = -1;
  }
};

}  // namespace detail

/// Exhaustive (N+1)^T assignment search; T <= 10 and N <= 5.
inline MultiOptResult opt_multi(const MultiInstance& inst) {
  if (inst.items() > kMaxMultiItems || inst.knapsacks() > kMaxMultiKnapsacks) {
    throw SizeError("multi-knapsack optimum limited to 10 items and 5 knapsacks");
  }
  detail::MultiSearch search{inst, inst.capacities(), std::vector<int>(inst.items(), -1), 0.0, {}};
  search.best.assignment.assign(inst.items(), -1);
  search.run(0);
  MultiOptResult r = search.best;
  r.value = 0.0;
  for (std::size_t t = 0; t < inst.items(); ++t) {
    if (r.assignment[t] >= 0) r.value += inst.size(t, static_cast<std::size_t>(r.assignment[t]));
  }
  return r;
}

}  // namespace onknap

#endif  // ONKNAP_OPTIMUM_HPP
