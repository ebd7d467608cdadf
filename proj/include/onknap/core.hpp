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

// Item sequences and the single-knapsack simulation engine.
//
// Two numeric modes share one implementation:
//   * fraction mode (Size = double): sizes are real, usually with capacity 1.
//     An item fits when size <= remaining + 1e-12.
//   * unit mode (Size = std::int64_t): sizes and capacity are integer units,
//     all comparisons are exact. Items larger than the capacity are legal and
//     are blocked under every policy.
//
// Admission is "size >= threshold" and fitting is "size <= remaining"; ties
// always accept.

#ifndef ONKNAP_CORE_HPP
#define ONKNAP_CORE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "onknap/errors.hpp"

namespace onknap {

template <class Size>
struct SizeTraits;

template <>
struct SizeTraits<double> {
  static constexpr double kFitSlack = 1e-12;
  static bool fits(double size, double remaining) { return size <= remaining + kFitSlack; }
  // Smallest admitted size for a threshold given as a fraction of capacity.
  static double threshold_units(double tau, double capacity) { return tau * capacity; }
  // Strict "a > b" used by proof quantities (blocked conditions).
  static bool exceeds(double a, double b) { return a > b + kFitSlack; }
};

template <>
struct SizeTraits<std::int64_t> {
  static bool fits(std::int64_t size, std::int64_t remaining) { return size <= remaining; }
  static std::int64_t threshold_units(double tau, std::int64_t capacity) {
    // 1e-9 absorbs the rounding of tau * capacity when tau was built as k / capacity.
    return static_cast<std::int64_t>(std::ceil(tau * static_cast<double>(capacity) - 1e-9));
  }
  static bool exceeds(std::int64_t a, std::int64_t b) { return a > b; }
};

/// Ordered item sizes plus the knapsack capacity they are measured against.
template <class Size>
class ItemSequence {
 public:
  ItemSequence() = default;

  ItemSequence(std::vector<Size> sizes, Size capacity)
      : sizes_(std::move(sizes)), capacity_(capacity) {
    if (!(capacity_ > Size{0})) throw ArgumentError("capacity must be positive");
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (!(sizes_[i] > Size{0})) {
        throw ArgumentError("item " + std::to_string(i + 1) + " has nonpositive size");
      }
    }
  }

  /// Unit-capacity sequence; every size must lie in (0, 1].
  static ItemSequence fractions(std::vector<Size> sizes)
    requires std::is_floating_point_v<Size>
  {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (!(sizes[i] > 0.0) || sizes[i] > 1.0) {
        throw ArgumentError("item " + std::to_string(i + 1) + " is outside (0, 1]");
      }
    }
    return ItemSequence(std::move(sizes), Size{1});
  }

  const std::vector<Size>& sizes() const noexcept { return sizes_; }
  Size capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return sizes_.size(); }
  bool empty() const noexcept { return sizes_.empty(); }
  Size operator[](std::size_t i) const { return sizes_[i]; }

  /// Size of item i as a fraction of capacity.
  double fraction(std::size_t i) const {
    return static_cast<double>(sizes_[i]) / static_cast<double>(capacity_);
  }

  Size total() const {
    Size sum{0};
    for (Size s : sizes_) sum += s;
    return sum;
  }

  /// size(A): total size of an index subset.
  Size size_of(const std::vector<std::size_t>& indices) const {
    Size sum{0};
    for (std::size_t i : indices) sum += sizes_.at(i);
    return sum;
  }

 private:
  std::vector<Size> sizes_;
  Size capacity_{1};
};

using FractionSequence = ItemSequence<double>;
using UnitSequence = ItemSequence<std::int64_t>;

enum class ItemStatus : std::uint8_t { accepted, rejected, blocked };

inline const char* to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::accepted: return "accepted";
    case ItemStatus::rejected: return "rejected";
    case ItemStatus::blocked: return "blocked";
  }
  return "?";
}

/// Mutable fill state of one knapsack during a run.
template <class Size>
struct KnapsackState {
  Size capacity{};
  Size packed{};
  std::vector<std::size_t> accepted_indices;

  Size remaining() const { return capacity - packed; }
  bool fits(Size s) const { return SizeTraits<Size>::fits(s, remaining()); }
  void accept(std::size_t index, Size s) {
    packed += s;
    accepted_indices.push_back(index);
  }
};

/// Trace of one deterministic run.
///
/// `status[i]` is blocked whenever item i did not fit at its arrival, even if
/// the policy would also have rejected it; that case sets `also_rejected[i]`.
template <class Size>
struct PackingOutcome {
  std::vector<std::size_t> accepted_indices;
  Size packed_total{};
  std::vector<ItemStatus> status;
  std::vector<bool> also_rejected;
};

/// Runs an arbitrary admission predicate `admit(index, size) -> bool` in arrival order.
template <class Size, class Admit>
PackingOutcome<Size> simulate_admission(const ItemSequence<Size>& seq, Admit&& admit) {
  KnapsackState<Size> state{seq.capacity(), Size{0}, {}};
  PackingOutcome<Size> out;
  out.status.resize(seq.size());
  out.also_rejected.assign(seq.size(), false);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Size s = seq[i];
    const bool admitted = admit(i, s);
    if (!state.fits(s)) {
      out.status[i] = ItemStatus::blocked;
      out.also_rejected[i] = !admitted;
    } else if (!admitted) {
      out.status[i] = ItemStatus::rejected;
    } else {
      out.status[i] = ItemStatus::accepted;
      state.accept(i, s);
    }
  }
  out.accepted_indices = std::move(state.accepted_indices);
  out.packed_total = state.packed;
  return out;
}

/// THR with the admission bound given directly in size units: accept s >= min_size.
template <class Size>
PackingOutcome<Size> simulate_min_size(const ItemSequence<Size>& seq, Size min_size) {
  return simulate_admission(seq, [min_size](std::size_t, Size s) { return s >= min_size; });
}

/// THR(tau): tau is a fraction of capacity in [0, 1]. THR(0) is Greedy.
template <class Size>
PackingOutcome<Size> simulate_fixed_threshold(const ItemSequence<Size>& seq, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
  return simulate_min_size(seq, SizeTraits<Size>::threshold_units(tau, seq.capacity()));
}

/// Greedy / FCFS written out independently of the threshold engine.
template <class Size>
PackingOutcome<Size> simulate_greedy(const ItemSequence<Size>& seq) {
  PackingOutcome<Size> out;
  out.status.assign(seq.size(), ItemStatus::blocked);
  out.also_rejected.assign(seq.size(), false);
  Size used{0};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (SizeTraits<Size>::fits(seq[i], seq.capacity() - used)) {
      used += seq[i];
      out.accepted_indices.push_back(i);
      out.status[i] = ItemStatus::accepted;
    }
  }
  out.packed_total = used;
  return out;
}

template <class Size>
struct TwoBinsResult {
  PackingOutcome<Size> heads;  // Greedy
  PackingOutcome<Size> tails;  // skip until the shadow Greedy blocks, then Greedy
  double expected_packed = 0.0;
};

/// Fair-coin mixture of Greedy and "wait for Greedy's first block, then Greedy".
///
/// When the shadow Greedy never blocks, the Tails branch packs nothing.
template <class Size>
TwoBinsResult<Size> simulate_two_bins(const ItemSequence<Size>& seq) {
  TwoBinsResult<Size> r;
  r.heads = simulate_greedy(seq);

  Size shadow_used{0};
  bool started = false;
  r.tails = simulate_admission(seq, [&](std::size_t, Size s) {
    if (!started) {
      if (SizeTraits<Size>::fits(s, seq.capacity() - shadow_used)) {
        shadow_used += s;
        return false;
      }
      started = true;
    }
    return true;
  });
  r.expected_packed =
      0.5 * (static_cast<double>(r.heads.packed_total) + static_cast<double>(r.tails.packed_total));
  return r;
}

/// Structure of a Greedy run used by the lower-bound analysis.
template <class Size>
struct GreedyBlockInfo {
  std::vector<std::size_t> blocked;        // M, in arrival order
  Size m{};                                // smallest size in M
  std::size_t t_m = 0;                     // first index in M with size m
  std::vector<std::size_t> before_t_m;     // G': Greedy-accepted items before t_m
  Size g_prime{};                          // size(G')
};

/// Extracts M, m, t_m and G' from a Greedy outcome. Empty optional when Greedy packs everything.
template <class Size>
std::optional<GreedyBlockInfo<Size>> classify_items(const ItemSequence<Size>& seq,
                                                    const PackingOutcome<Size>& greedy) {
  if (greedy.status.size() != seq.size()) {
    throw ArgumentError("outcome does not match the sequence length");
  }
  for (ItemStatus st : greedy.status) {
    if (st == ItemStatus::rejected) throw ArgumentError("outcome was not produced by Greedy");
  }
  GreedyBlockInfo<Size> info;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (greedy.status[i] == ItemStatus::blocked) info.blocked.push_back(i);
  }
  if (info.blocked.empty()) return std::nullopt;

  info.t_m = info.blocked.front();
  info.m = seq[info.t_m];
  for (std::size_t i : info.blocked) {
    if (seq[i] < info.m) {
      info.m = seq[i];
      info.t_m = i;
    }
  }
  info.g_prime = Size{0};
  for (std::size_t i : greedy.accepted_indices) {
    if (i < info.t_m) {
      info.before_t_m.push_back(i);
      info.g_prime += seq[i];
    }
  }
  return info;
}

}  // namespace onknap

#endif  // ONKNAP_CORE_HPP
