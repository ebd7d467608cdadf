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

// Multiple knapsacks: greedy routing (each item goes to the knapsack where it
// is largest, ignoring fill) followed by an independent threshold policy per
// knapsack. With the 3/7 distribution on every knapsack this is
// 3/14-competitive against the integer multi-knapsack optimum.

#ifndef ONKNAP_MULTIKNAPSACK_HPP
#define ONKNAP_MULTIKNAPSACK_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/evaluation.hpp"
#include "onknap/multi_instance.hpp"
#include "onknap/optimum.hpp"
#include "onknap/parallel.hpp"
#include "onknap/thresholds.hpp"

namespace onknap {

/// Tie rule among knapsacks sharing the maximal size.
///
/// `lowest_index` ignores fill state and is the rule the guarantee covers.
/// `lowest_index_fitting` prefers the lowest tied knapsack where the item still
/// fits; it reproduces the canonical phase-two rule of the upper-triangular
/// construction but makes routing depend on the thresholds.
enum class TieBreak : std::uint8_t { lowest_index, lowest_index_fitting };

enum class ThresholdCorrelation : std::uint8_t { independent, shared };

struct Routing {
  std::vector<std::optional<std::size_t>> target;  // per item; empty = unroutable
  std::vector<std::vector<std::size_t>> routed;    // I_j, arrival order
  std::vector<std::size_t> unroutable;
};

/// Routes every item to argmax_j s_tj (lowest index on ties). All-zero items are unroutable.
inline Routing route_greedy(const MultiInstance& inst) {
  Routing r;
  r.target.resize(inst.items());
  r.routed.resize(inst.knapsacks());
  for (std::size_t t = 0; t < inst.items(); ++t) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < inst.knapsacks(); ++j) {
      if (inst.size(t, j) > inst.size(t, best)) best = j;
    }
    if (inst.size(t, best) > 0.0) {
      r.target[t] = best;
      r.routed[best].push_back(t);
    } else {
      r.unroutable.push_back(t);
    }
  }
  return r;
}

struct MultiOutcome {
  std::vector<std::optional<std::size_t>> assignment;  // knapsack per item, empty = not packed
  std::vector<ItemStatus> status;
  std::vector<double> packed;                          // per knapsack
  std::vector<double> thresholds;                      // tau_j actually used
  Routing routing;                                     // pre-threshold routing

  double total() const {
    double s = 0.0;
    for (double p : packed) s += p;
    return s;
  }
};

/// Combined policy with deterministic per-knapsack thresholds tau_j (fractions of B_j).
inline MultiOutcome simulate_combined(const MultiInstance& inst, std::span<const double> taus,
                                      TieBreak tie = TieBreak::lowest_index) {
  if (taus.size() != inst.knapsacks()) throw ArgumentError("need one threshold per knapsack");
  for (double tau : taus) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
  }
  const std::size_t n = inst.knapsacks();
  MultiOutcome out;
  out.assignment.resize(inst.items());
  out.status.assign(inst.items(), ItemStatus::rejected);
  out.packed.assign(n, 0.0);
  out.thresholds.assign(taus.begin(), taus.end());
  out.routing.target.resize(inst.items());
  out.routing.routed.resize(n);

  for (std::size_t t = 0; t < inst.items(); ++t) {
    std::optional<std::size_t> dest;
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (inst.size(t, j) > best) best = inst.size(t, j);
    }
    if (best > 0.0) {
      for (std::size_t j = 0; j < n && !dest; ++j) {
        if (inst.size(t, j) != best) continue;
        if (tie == TieBreak::lowest_index ||
            SizeTraits<double>::fits(best, inst.capacities()[j] - out.packed[j])) {
          dest = j;
        }
      }
      if (!dest) {
        for (std::size_t j = 0; j < n && !dest; ++j) {
          if (inst.size(t, j) == best) dest = j;
        }
      }
    }
    if (!dest) {
      out.routing.unroutable.push_back(t);
      continue;
    }
    const std::size_t j = *dest;
    out.routing.target[t] = j;
    out.routing.routed[j].push_back(t);
    const double s = inst.size(t, j);
    const double cap = inst.capacities()[j];
    if (!SizeTraits<double>::fits(s, cap - out.packed[j])) {
      out.status[t] = ItemStatus::blocked;
    } else if (s >= taus[j] * cap) {
      out.status[t] = ItemStatus::accepted;
      out.assignment[t] = j;
      out.packed[j] += s;
    }
  }
  return out;
}

/// Combined policy with random thresholds tau_j ~ F_j drawn once up front.
inline MultiOutcome simulate_combined(const MultiInstance& inst, std::span<const ThresholdCdf> cdfs,
                                      std::uint64_t seed,
                                      ThresholdCorrelation corr = ThresholdCorrelation::independent,
                                      TieBreak tie = TieBreak::lowest_index) {
  if (cdfs.size() != inst.knapsacks()) throw ArgumentError("need one threshold CDF per knapsack");
  std::mt19937_64 rng(seed);
  std::vector<double> taus(cdfs.size());
  if (corr == ThresholdCorrelation::shared) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    for (std::size_t j = 0; j < cdfs.size(); ++j) taus[j] = cdfs[j].quantile(u);
  } else {
    for (std::size_t j = 0; j < cdfs.size(); ++j) taus[j] = cdfs[j].sample(rng);
  }
  return simulate_combined(inst, taus, tie);
}

/// The single-knapsack sequence seen by knapsack j: sizes s_tj for t in I_j.
inline FractionSequence routed_sequence(const MultiInstance& inst, const Routing& routing,
                                        std::size_t j) {
  std::vector<double> sizes;
  sizes.reserve(routing.routed[j].size());
  for (std::size_t t : routing.routed[j]) sizes.push_back(inst.size(t, j));
  return FractionSequence(std::move(sizes), inst.capacities()[j]);
}

struct CombinedExpectation {
  std::vector<double> per_knapsack;  // E[ALG_j]
  std::vector<double> opt_plus;      // OPT+_j = min(sum over I_j, B_j)
  double expected_total = 0.0;
};

/// Exact expected packing under greedy routing. Routing does not depend on the
/// thresholds, so E[total] = sum_j E[THR on I_j] for any correlation of the
/// per-knapsack draws; only the marginals F_j matter.
inline CombinedExpectation expected_combined_exact(const MultiInstance& inst,
                                                   std::span<const ThresholdCdf> cdfs) {
  if (cdfs.size() != inst.knapsacks()) throw ArgumentError("need one threshold CDF per knapsack");
  const Routing routing = route_greedy(inst);
  CombinedExpectation e;
  e.per_knapsack.assign(inst.knapsacks(), 0.0);
  e.opt_plus.assign(inst.knapsacks(), 0.0);
  for (std::size_t j = 0; j < inst.knapsacks(); ++j) {
    if (routing.routed[j].empty()) continue;
    const FractionSequence seq = routed_sequence(inst, routing, j);
    e.per_knapsack[j] = expected_packed_exact(seq, cdfs[j]).expected_packed;
    e.opt_plus[j] = opt_plus(seq).value;
    e.expected_total += e.per_knapsack[j];
  }
  return e;
}

struct GuaranteeCheck {
  double expected_total = 0.0;
  double opt = 0.0;
  double ratio = 0.0;
};

/// Expected combined packing with F on every knapsack versus the exhaustive optimum.
inline GuaranteeCheck guarantee_check(const MultiInstance& inst, const ThresholdCdf& f) {
  const std::vector<ThresholdCdf> cdfs(inst.knapsacks(), f);
  GuaranteeCheck g;
  g.expected_total = expected_combined_exact(inst, cdfs).expected_total;
  g.opt = opt_multi(inst).value;
  g.ratio = g.opt > 0.0 ? g.expected_total / g.opt : 1.0;
  return g;
}

}  // namespace onknap

#endif  // ONKNAP_MULTIKNAPSACK_HPP
