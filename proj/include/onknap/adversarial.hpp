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

// Input distributions on which every deterministic policy does poorly, and
// verifiers that recompute their per-threshold expectations two ways.
//
//   thm32: 3/7 + O(eps) upper bound for threshold policies vs OPT+.
//   thm34: c* + O(eps) upper bound for threshold policies vs OPT.
//   thm42: 35/76 + O(eps) upper bound for any multi-knapsack algorithm.
//
// Runs of tiny items are realized with a unit that divides their total
// exactly; the unit is at most eps, so every bound holds with the unit in
// place of eps.

#ifndef ONKNAP_ADVERSARIAL_HPP
#define ONKNAP_ADVERSARIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/multi_instance.hpp"
#include "onknap/thresholds.hpp"

namespace onknap {

enum class Construction : std::uint8_t { thm32, thm34, thm42 };

inline const char* to_string(Construction c) {
  switch (c) {
    case Construction::thm32: return "thm32";
    case Construction::thm34: return "thm34";
    case Construction::thm42: return "thm42";
  }
  return "?";
}

struct SequenceBranch {
  std::string label;
  double probability = 0.0;
  std::vector<double> sizes;
};

/// A branch whose sequence depends on a parameter q with density on [lo, hi].
struct ContinuousBranch {
  std::string label;
  double mass = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::function<double(double)> density;
  std::function<std::vector<double>(double)> realize;
  std::function<double(double)> inverse_cdf;  // U in [0, 1) -> q, conditional on the branch
  std::vector<double> breakpoints;            // ascending q inside (lo, hi) where realize jumps
};

struct MultiBranch {
  double probability = 0.0;
  bool phase_two = false;
  std::vector<std::size_t> permutation;  // pi, 0-based; empty without phase two
  MultiInstance instance;
};

struct AdversarialDistribution {
  Construction kind = Construction::thm32;
  double epsilon = 0.0;
  std::map<std::string, double> parameters;
  std::vector<SequenceBranch> branches;
  std::optional<ContinuousBranch> continuous;
  std::vector<MultiBranch> multi;  // thm42 only

  double total_mass() const {
    double m = 0.0;
    for (const SequenceBranch& b : branches) m += b.probability;
    if (continuous) m += continuous->mass;
    for (const MultiBranch& b : multi) m += b.probability;
    return m;
  }

  /// One realization of a single-knapsack construction.
  template <class Rng>
  FractionSequence sample(Rng& rng) const {
    if (kind == Construction::thm42) throw ArgumentError("use sample_instance for thm42");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * total_mass();
    for (const SequenceBranch& b : branches) {
      if (u < b.probability) return FractionSequence::fractions(b.sizes);
      u -= b.probability;
    }
    if (continuous) return FractionSequence::fractions(continuous->realize(continuous->inverse_cdf(unit(rng))));
    return FractionSequence::fractions(branches.back().sizes);
  }

  /// One realization of the multi-knapsack construction.
  template <class Rng>
  MultiInstance sample_instance(Rng& rng) const {
    if (kind != Construction::thm42) throw ArgumentError("sample_instance requires thm42");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * total_mass();
    for (const MultiBranch& b : multi) {
      if (u < b.probability) return b.instance;
      u -= b.probability;
    }
    return multi.back().instance;
  }
};

namespace detail {

inline void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-2)) throw ArgumentError("epsilon must lie in (0, 0.01]");
}

inline double packed_at(const std::vector<double>& sizes, double tau) {
  return simulate_fixed_threshold(FractionSequence::fractions(sizes), tau).packed_total;
}

}  // namespace detail

/// (1/3, 2/3+e) w.p. 3/7; (e x (k+1), 1/3) w.p. 3/7; (e, 1) w.p. 1/7, with e = 2/(3k).
inline AdversarialDistribution build_thm32(double epsilon) {
  detail::check_epsilon(epsilon);
  const auto k = static_cast<std::size_t>(std::ceil(2.0 / (3.0 * epsilon)));
  const double e = 2.0 / (3.0 * static_cast<double>(k));

  AdversarialDistribution d;
  d.kind = Construction::thm32;
  d.epsilon = epsilon;
  d.parameters = {{"unit", e}, {"k", static_cast<double>(k)}};
  d.branches.push_back({"third_then_large", 3.0 / 7.0, {1.0 / 3.0, 2.0 / 3.0 + e}});
  std::vector<double> run(k + 1, e);
  run.push_back(1.0 / 3.0);
  d.branches.push_back({"run_then_third", 3.0 / 7.0, std::move(run)});
  d.branches.push_back({"unit_then_one", 1.0 / 7.0, {e, 1.0}});
  return d;
}

/// Four-branch construction around (q*, c*). The x-branch is the arithmetic
/// run q*, 1-q*+d, ..., 1 with d = q*/K; the y-run uses e = (1-q*)/k; the
/// continuous branch splits 1-q into n = ceil((1-q)/e) equal items plus one more.
inline AdversarialDistribution build_thm34(double epsilon, const SolvedConstants& consts) {
  detail::check_epsilon(epsilon);
  const double q = consts.q_star;
  const double c = consts.c_star;
  const double x = (1.0 - 2.0 * c) / (1.0 - 2.0 * q);
  const double y = (1.0 - 2.0 * c) / q;
  const double z = c - x;
  const double cont = -x * std::log1p(-q);

  const auto k = static_cast<std::size_t>(std::ceil((1.0 - q) / epsilon));
  const double e = (1.0 - q) / static_cast<double>(k);
  const auto big_k = static_cast<std::size_t>(std::ceil(q / epsilon));
  const double step = q / static_cast<double>(big_k);

  AdversarialDistribution d;
  d.kind = Construction::thm34;
  d.epsilon = epsilon;
  d.parameters = {{"x", x},           {"y", y},      {"z", z},
                  {"q_star", q},      {"c_star", c}, {"continuous_mass", cont},
                  {"unit", e},        {"step", step}, {"k", static_cast<double>(k)},
                  {"K", static_cast<double>(big_k)}};

  std::vector<double> ladder{q};
  for (std::size_t j = 1; j <= big_k; ++j) {
    ladder.push_back(j == big_k ? 1.0 : (1.0 - q) + static_cast<double>(j) * step);
  }
  d.branches.push_back({"ladder", x, std::move(ladder)});
  std::vector<double> run(k + 1, e);
  run.push_back(q);
  d.branches.push_back({"run_then_q", y, std::move(run)});
  d.branches.push_back({"unit_then_one", z, {e, 1.0}});

  ContinuousBranch cb;
  cb.label = "run_then_u";
  cb.mass = cont;
  cb.lo = 1.0 - q;
  cb.hi = 1.0;
  cb.density = [x](double s) { return x / s; };
  cb.realize = [e](double s) {
    const double rest = 1.0 - s;
    if (!(rest > 0.0)) return std::vector<double>{e, 1.0};
    const double n = std::max(1.0, std::ceil(rest / e));
    std::vector<double> v(static_cast<std::size_t>(n) + 1, rest / n);
    v.push_back(s);
    return v;
  };
  const double lo = cb.lo;
  cb.inverse_cdf = [lo](double u) { return lo * std::exp(u * std::log(1.0 / lo)); };
  for (std::size_t j = 1;; ++j) {
    const double b = 1.0 - static_cast<double>(j) * e;
    if (!(b > lo + 1e-12)) break;
    cb.breakpoints.push_back(b);
  }
  std::reverse(cb.breakpoints.begin(), cb.breakpoints.end());
  d.continuous = std::move(cb);

  if (std::fabs(d.total_mass() - 1.0) > 1e-6) {
    throw VerificationError("thm34 distribution mass deviates from 1 by more than 1e-6");
  }
  return d;
}

/// One row per representative threshold.
struct TightnessRow {
  int case_id = 0;
  double case_lo = 0.0;  // the case covers (case_lo, case_hi]; case 1 includes 0
  double case_hi = 0.0;
  double tau = 0.0;
  double proof_value = 0.0;  // the case bound with the realized unit in place of eps
  double closed_form = 0.0;  // exact expectation of the realized construction
  double simulated = 0.0;    // branch-by-branch simulation
};

struct TightnessTable {
  Construction kind = Construction::thm32;
  double epsilon = 0.0;
  double unit = 0.0;
  double step = 0.0;
  double expected_opt = 1.0;
  double total_mass = 0.0;
  double bound = 0.0;          // stated upper bound in terms of eps
  double max_simulated = 0.0;
  double max_ratio = 0.0;
  double tolerance = 0.0;
  std::vector<TightnessRow> rows;
};

/// Closed-form E[THR(tau)] on the thm32 construction.
inline double thm32_closed_form(const AdversarialDistribution& d, double tau) {
  const double e = d.parameters.at("unit");
  if (tau <= e) return 3.0 / 7.0 + 4.0 * e / 7.0;
  if (tau <= 1.0 / 3.0) return 3.0 / 7.0;
  if (tau <= 2.0 / 3.0 + e) return 3.0 / 7.0 + 3.0 * e / 7.0;
  return 1.0 / 7.0;
}

/// Mixture expectation of THR(tau), simulating each discrete branch and
/// integrating the continuous branch piecewise with Gauss-Kronrod.
inline double simulate_mixture(const AdversarialDistribution& d, double tau) {
  double total = 0.0;
  for (const SequenceBranch& b : d.branches) total += b.probability * detail::packed_at(b.sizes, tau);
  if (!d.continuous) return total;
  const ContinuousBranch& cb = *d.continuous;
  std::vector<double> cuts{cb.lo};
  cuts.insert(cuts.end(), cb.breakpoints.begin(), cb.breakpoints.end());
  if (tau > cb.lo && tau < cb.hi) cuts.push_back(tau);
  cuts.push_back(cb.hi);
  std::sort(cuts.begin(), cuts.end());
  auto integrand = [&](double s) { return detail::packed_at(cb.realize(s), tau) * cb.density(s); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, cuts[i], cuts[i + 1], 5,
                                                                           1e-13);
  }
  return total;
}

/// Closed-form E[THR(tau)] on the realized thm34 construction.
///
/// tau in (0, unit] is not covered: some run items in the continuous branch
/// are shorter than the unit, so only tau = 0 represents case 1 exactly.
inline double thm34_closed_form(const AdversarialDistribution& d, double tau) {
  const double x = d.parameters.at("x");
  const double y = d.parameters.at("y");
  const double z = d.parameters.at("z");
  const double q = d.parameters.at("q_star");
  const double e = d.parameters.at("unit");
  const double step = d.parameters.at("step");
  const double lo = 1.0 - q;
  if (tau == 0.0) {
    // Run of n+1 items of (1-q)/n: packs (1-q)(1 + 1/n), n constant between breakpoints.
    double cont = 0.0;
    const ContinuousBranch& cb = *d.continuous;
    std::vector<double> cuts{cb.lo};
    cuts.insert(cuts.end(), cb.breakpoints.begin(), cb.breakpoints.end());
    cuts.push_back(cb.hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i];
      const double b = cuts[i + 1];
      const double n = std::round((1.0 - b) / e) + 1.0;
      cont += x * (1.0 + 1.0 / n) * (std::log(b / a) - (b - a));
    }
    return x * q + y * (lo + e) + z * e + cont;
  }
  if (tau <= e) throw ArgumentError("thm34 closed form is defined for tau = 0 or tau > unit");
  if (tau <= q) return x * q + y * q + z + x * q;
  if (tau <= lo + step) return x * (lo + step) + z + x * (1.0 - std::max(tau, lo));
  const double j = std::ceil((tau - lo) / step - 1e-9);
  const double first = std::min(1.0, lo + j * step);
  return x * first + z + x * (1.0 - tau);
}

inline TightnessTable verify_thm32(double epsilon) {
  const AdversarialDistribution d = build_thm32(epsilon);
  const double e = d.parameters.at("unit");
  TightnessTable t;
  t.kind = Construction::thm32;
  t.epsilon = epsilon;
  t.unit = e;
  t.step = e;
  t.total_mass = d.total_mass();
  t.bound = 3.0 / 7.0 + 4.0 * epsilon / 7.0;
  t.tolerance = 1e-9;
  struct Rep {
    int id;
    double lo, hi, tau, proof;
  };
  const double third = 1.0 / 3.0;
  const double top = 2.0 / 3.0 + e;
  const std::vector<Rep> reps{
      {1, 0.0, e, 0.0, 3.0 / 7.0 + 4.0 * e / 7.0},     {1, 0.0, e, e, 3.0 / 7.0 + 4.0 * e / 7.0},
      {2, e, third, 1.5 * e, 3.0 / 7.0},                {2, e, third, third, 3.0 / 7.0},
      {3, third, top, 0.5, 3.0 / 7.0 + 3.0 * e / 7.0},  {3, third, top, top, 3.0 / 7.0 + 3.0 * e / 7.0},
      {4, top, 1.0, 0.9, 1.0 / 7.0},                    {4, top, 1.0, 1.0, 1.0 / 7.0}};
  for (const Rep& r : reps) {
    TightnessRow row{r.id, r.lo, r.hi, r.tau, r.proof, thm32_closed_form(d, r.tau), simulate_mixture(d, r.tau)};
    t.rows.push_back(row);
  }
  for (const SequenceBranch& b : d.branches) {
    const double total = std::accumulate(b.sizes.begin(), b.sizes.end(), 0.0);
    if (std::min(total, 1.0) < 1.0 - 1e-9) throw VerificationError("thm32 branch with OPT+ below 1");
  }
  for (const TightnessRow& row : t.rows) {
    if (std::fabs(row.closed_form - row.simulated) > t.tolerance ||
        std::fabs(row.closed_form - row.proof_value) > t.tolerance) {
      throw VerificationError("thm32 case " + std::to_string(row.case_id) +
                              ": closed form and simulation disagree");
    }
    t.max_simulated = std::max(t.max_simulated, row.simulated);
  }
  t.max_ratio = t.max_simulated / t.expected_opt;
  if (t.max_ratio > t.bound + t.tolerance) throw VerificationError("thm32 ratio exceeds its bound");
  return t;
}

inline TightnessTable verify_thm34(double epsilon, const SolvedConstants& consts) {
  const AdversarialDistribution d = build_thm34(epsilon, consts);
  const double x = d.parameters.at("x");
  const double q = consts.q_star;
  const double c = consts.c_star;
  const double e = d.parameters.at("unit");
  const double step = d.parameters.at("step");
  const double lo = 1.0 - q;
  const auto big_k = static_cast<std::size_t>(d.parameters.at("K"));
  TightnessTable t;
  t.kind = Construction::thm34;
  t.epsilon = epsilon;
  t.unit = e;
  t.step = step;
  t.total_mass = d.total_mass();
  t.bound = c + epsilon * (1.0 - x);
  t.tolerance = 1e-7;
  struct Rep {
    int id;
    double lo, hi, tau, proof;
  };
  const double top = lo + step;
  const std::vector<Rep> reps{
      {1, 0.0, e, 0.0, c + e * (1.0 - x)},
      {2, e, q, 1.5 * e, c},
      {2, e, q, 0.5 * (e + q), c},
      {2, e, q, q, c},
      {3, q, top, 0.5, c + x * step},
      {3, q, top, lo, c + x * step},
      {3, q, top, top, c + x * step},
      {4, top, 1.0, lo + 2.0 * step, c},
      {4, top, 1.0, lo + static_cast<double>(big_k / 2) * step, c},
      {4, top, 1.0, 1.0, c}};
  for (const Rep& r : reps) {
    TightnessRow row{r.id, r.lo, r.hi, r.tau, r.proof, thm34_closed_form(d, r.tau), simulate_mixture(d, r.tau)};
    t.rows.push_back(row);
  }
  for (const TightnessRow& row : t.rows) {
    const std::string tag = "thm34 case " + std::to_string(row.case_id);
    if (std::fabs(row.closed_form - row.simulated) > t.tolerance) {
      throw VerificationError(tag + ": closed form and simulation disagree");
    }
    if (row.simulated > row.proof_value + t.tolerance || row.simulated < c - t.tolerance) {
      throw VerificationError(tag + ": expectation outside [c*, case bound]");
    }
    if ((row.case_id == 2 || row.case_id == 4) && std::fabs(row.simulated - c) > t.tolerance) {
      throw VerificationError(tag + ": expectation differs from c*");
    }
    t.max_simulated = std::max(t.max_simulated, row.simulated);
  }
  t.max_ratio = t.max_simulated / t.expected_opt;
  if (t.max_ratio > t.bound + t.tolerance) throw VerificationError("thm34 ratio exceeds its bound");
  return t;
}

/// Phase 1: N diagonal items of size eps. Phase 2 (prob 1 - alpha): item
/// N+t has size 1 outside {pi(1), ..., pi(t-1)} and 0 inside.
inline MultiInstance upper_triangular_instance(std::size_t n, double epsilon,
                                               const std::vector<std::size_t>* permutation) {
  std::vector<std::vector<double>> items;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> row(n, 0.0);
    row[t] = epsilon;
    items.push_back(std::move(row));
  }
  if (permutation) {
    std::vector<double> row(n, 1.0);
    for (std::size_t t = 0; t < n; ++t) {
      items.push_back(row);
      row[(*permutation)[t]] = 0.0;
    }
  }
  return MultiInstance(std::vector<double>(n, 1.0), std::move(items));
}

/// Default alpha = 1 - 12 eps / 7, used for every N.
inline AdversarialDistribution build_thm42(std::size_t n, double epsilon,
                                           std::optional<double> alpha_term = std::nullopt) {
  if (n < 2 || n > 8) throw ArgumentError("thm42 needs 2 <= N <= 8");
  detail::check_epsilon(epsilon);
  // Keep 1 - alpha exact; forming it from alpha cancels badly for tiny eps.
  const double go_on = alpha_term ? 1.0 - *alpha_term : 12.0 * epsilon / 7.0;
  const double alpha = alpha_term.value_or(1.0 - go_on);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha_term must lie in [0, 1]");
  AdversarialDistribution d;
  d.kind = Construction::thm42;
  d.epsilon = epsilon;
  const double nd = static_cast<double>(n);
  d.parameters = {{"N", nd},
                  {"alpha_term", alpha},
                  {"continue_prob", go_on},
                  {"expected_opt", alpha * nd * epsilon + go_on * nd}};
  d.multi.push_back({alpha, false, {}, upper_triangular_instance(n, epsilon, nullptr)});
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<MultiBranch> tail;
  do {
    tail.push_back({0.0, true, perm, upper_triangular_instance(n, epsilon, &perm)});
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (MultiBranch& b : tail) b.probability = go_on / static_cast<double>(tail.size());
  d.multi.insert(d.multi.end(), tail.begin(), tail.end());
  return d;
}

/// Accepts the eps item of knapsacks 0..e-1, then places each later item in
/// the lowest-index knapsack where it has positive size and still fits.
/// Returns the number of phase-two items accepted.
inline std::size_t canonical_phase_two(const MultiInstance& inst, std::size_t e) {
  const std::size_t n = inst.knapsacks();
  std::vector<double> remaining = inst.capacities();
  for (std::size_t t = 0; t < n && t < inst.items(); ++t) {
    if (t < e) remaining[t] -= inst.size(t, t);
  }
  std::size_t accepted = 0;
  for (std::size_t t = n; t < inst.items(); ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = inst.size(t, j);
      if (s > 0.0 && SizeTraits<double>::fits(s, remaining[j])) {
        remaining[j] -= s;
        ++accepted;
        break;
      }
    }
  }
  return accepted;
}

struct Thm42Row {
  std::size_t e = 0;
  std::map<std::size_t, std::size_t> histogram;  // phase-two accepts -> permutation count
  std::size_t accepted_sum = 0;                  // numerator of the phase-two mean
  std::size_t permutations = 0;
  double expected_phase_two = 0.0;
  double expected_alg = 0.0;
  double ratio = 0.0;
};

struct Thm42Table {
  std::size_t n = 0;
  double epsilon = 0.0;
  double alpha_term = 0.0;
  double expected_opt = 0.0;
  std::vector<Thm42Row> rows;
  double best_ratio = 0.0;
  std::vector<std::size_t> best_e;
  std::optional<double> bound;  // 35/(76 - 48 eps), N = 4 only
};

/// Enumerates all N! permutations for each e. For N = 4 the best ratio must
/// equal 35/(76 - 48 eps).
inline Thm42Table enumerate_thm42(std::size_t n = 4, double epsilon = 1e-3) {
  const AdversarialDistribution d = build_thm42(n, epsilon);
  Thm42Table table;
  table.n = n;
  table.epsilon = epsilon;
  table.alpha_term = d.parameters.at("alpha_term");
  table.expected_opt = d.parameters.at("expected_opt");
  for (std::size_t e = 0; e <= n; ++e) {
    Thm42Row row;
    row.e = e;
    for (const MultiBranch& b : d.multi) {
      if (!b.phase_two) continue;
      const std::size_t a = canonical_phase_two(b.instance, e);
      ++row.histogram[a];
      row.accepted_sum += a;
      ++row.permutations;
    }
    row.expected_phase_two = static_cast<double>(row.accepted_sum) / static_cast<double>(row.permutations);
    row.expected_alg =
        static_cast<double>(e) * epsilon + d.parameters.at("continue_prob") * row.expected_phase_two;
    row.ratio = row.expected_alg / table.expected_opt;
    table.rows.push_back(row);
  }
  for (const Thm42Row& row : table.rows) table.best_ratio = std::max(table.best_ratio, row.ratio);
  for (const Thm42Row& row : table.rows) {
    if (row.ratio >= table.best_ratio - 1e-12) table.best_e.push_back(row.e);
  }
  if (n == 4) {
    table.bound = 35.0 / (76.0 - 48.0 * epsilon);
    if (std::fabs(table.best_ratio - *table.bound) > 1e-12) {
      throw VerificationError("thm42 best ratio differs from 35/(76 - 48 eps)");
    }
  }
  return table;
}

}  // namespace onknap

#endif  // ONKNAP_ADVERSARIAL_HPP
