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

// Expected packing of random-threshold policies, competitive ratios, and the
// lower-bound certificates used to sanity-check the 3/7 analysis.

#ifndef ONKNAP_EVALUATION_HPP
#define ONKNAP_EVALUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "onknap/core.hpp"
#include "onknap/errors.hpp"
#include "onknap/optimum.hpp"
#include "onknap/parallel.hpp"
#include "onknap/thresholds.hpp"

namespace onknap {

enum class EvalMethod : std::uint8_t { exact, monte_carlo };

inline const char* to_string(EvalMethod m) {
  return m == EvalMethod::exact ? "exact" : "monte_carlo";
}

/// Threshold interval (tau_lo, tau_hi] (the atom is [0, 0]) over which THR
/// packs the constant amount `packed`.
struct ThresholdSegment {
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  double mass = 0.0;
  double packed = 0.0;
};

struct ExpectationReport {
  double expected_packed = 0.0;
  std::vector<ThresholdSegment> segments;  // exact mode only
  EvalMethod method = EvalMethod::exact;
  std::size_t samples = 0;                 // monte carlo only
  double std_error = 0.0;                  // monte carlo only
};

/// E[THR(tau)] with tau ~ F, integrated exactly over the breakpoints of the
/// piecewise-constant map tau -> packed. Packing is constant on (a, b] between
/// consecutive distinct sizes, so THR is evaluated at each right endpoint b.
template <class Size>
ExpectationReport expected_packed_exact(const ItemSequence<Size>& seq, const ThresholdCdf& f) {
  if (seq.empty()) throw ArgumentError("sequence must be nonempty");
  std::vector<Size> distinct;
  for (Size s : seq.sizes()) {
    if (SizeTraits<Size>::fits(s, seq.capacity())) distinct.push_back(s);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  ExpectationReport r;
  r.method = EvalMethod::exact;
  const double cap = static_cast<double>(seq.capacity());
  const double greedy = static_cast<double>(simulate_greedy(seq).packed_total);
  r.segments.push_back({0.0, 0.0, f(0.0), greedy});

  double prev = 0.0;
  for (Size b : distinct) {
    const double at = std::min(1.0, static_cast<double>(b) / cap);
    const double packed = static_cast<double>(simulate_min_size(seq, b).packed_total);
    r.segments.push_back({prev, at, f(at) - f(prev), packed});
    prev = at;
  }
  if (prev < 1.0) r.segments.push_back({prev, 1.0, 1.0 - f(prev), 0.0});

  for (const ThresholdSegment& s : r.segments) r.expected_packed += s.mass * s.packed;
  return r;
}

/// Mean of n_samples THR(sample(F)) runs. Samples are drawn in fixed chunks,
/// each from its own seeded substream, so the result depends only on
/// (seed, n_samples) and not on `threads`.
template <class Size>
ExpectationReport expected_packed_mc(const ItemSequence<Size>& seq, const ThresholdCdf& f,
                                     std::size_t n_samples, std::uint64_t seed,
                                     unsigned threads = 1) {
  if (n_samples < 1) throw ArgumentError("need at least one sample");
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    std::mt19937_64 rng(derive_seed(seed, c));
    const std::size_t count = std::min(kChunk, n_samples - c * kChunk);
    Moments m;
    for (std::size_t k = 0; k < count; ++k) {
      const double tau = f.sample(rng);
      const double v = static_cast<double>(
          simulate_min_size(seq, SizeTraits<Size>::threshold_units(tau, seq.capacity())).packed_total);
      m.n += 1.0;
      const double d = v - m.mean;
      m.mean += d / m.n;
      m.m2 += d * (v - m.mean);
    }
    parts[c] = m;
  });
  Moments all;
  for (const Moments& p : parts) {
    if (p.n == 0.0) continue;
    const double n = all.n + p.n;
    const double d = p.mean - all.mean;
    all.mean += d * p.n / n;
    all.m2 += p.m2 + d * d * all.n * p.n / n;
    all.n = n;
  }
  ExpectationReport r;
  r.method = EvalMethod::monte_carlo;
  r.expected_packed = all.mean;
  r.samples = n_samples;
  r.std_error = all.n > 1.0 ? std::sqrt(all.m2 / (all.n - 1.0) / all.n) : 0.0;
  return r;
}

struct CompetitiveReport {
  double expected_packed = 0.0;
  double opt_plus = 0.0;
  double opt = 0.0;
  double ratio_vs_opt_plus = 0.0;
  double ratio_vs_opt = 0.0;
};

namespace detail {
inline double ratio_or_one(double value, double opt) { return opt > 0.0 ? value / opt : 1.0; }
}  // namespace detail

/// Exact expectation divided by OPT+ and OPT. A zero optimum yields ratio 1.
template <class Size>
CompetitiveReport competitive_report(const ItemSequence<Size>& seq, const ThresholdCdf& f) {
  CompetitiveReport r;
  r.expected_packed = expected_packed_exact(seq, f).expected_packed;
  r.opt_plus = static_cast<double>(opt_plus(seq).value);
  r.opt = static_cast<double>(opt_integer(seq).value);
  r.ratio_vs_opt_plus = detail::ratio_or_one(r.expected_packed, r.opt_plus);
  r.ratio_vs_opt = detail::ratio_or_one(r.expected_packed, r.opt);
  return r;
}

/// TwoBins ratios; its expectation is the exact two-branch average.
template <class Size>
CompetitiveReport two_bins_report(const ItemSequence<Size>& seq) {
  CompetitiveReport r;
  r.expected_packed = simulate_two_bins(seq).expected_packed;
  r.opt_plus = static_cast<double>(opt_plus(seq).value);
  r.opt = static_cast<double>(opt_integer(seq).value);
  r.ratio_vs_opt_plus = detail::ratio_or_one(r.expected_packed, r.opt_plus);
  r.ratio_vs_opt = detail::ratio_or_one(r.expected_packed, r.opt);
  return r;
}

/// Quantities of the 3/7 lower-bound argument, all as fractions of capacity.
struct BoundCertificate {
  double m = 0.0;             // smallest Greedy-blocked size
  std::size_t t_m = 0;        // its first arrival index
  double g_prime = 0.0;       // Greedy fill just before t_m
  double q = 0.0;             // largest tau that still blocks m
  std::size_t n = 0;          // items of size exactly q in G'
  double x = 0.0;             // the rest of S^THR(q) cap G'
  double nq_plus_x = 0.0;
  double bound_small_m = 0.0;
  double bound_large_m = 0.0;
  bool large_m = false;       // m >= 1/2 selects bound_large_m
  double applicable_bound = 0.0;
  double expected_packed = 0.0;
  bool holds = false;
};

/// Builds the certificate for F on seq. Items larger than the capacity are
/// ignored (they are blocked by every policy and by OPT).
template <class Size>
BoundCertificate bound_certificate(const ItemSequence<Size>& seq, const ThresholdCdf& f) {
  using Traits = SizeTraits<Size>;
  const Size cap = seq.capacity();
  const PackingOutcome<Size> greedy = simulate_greedy(seq);

  bool found = false;
  Size m{};
  std::size_t t_m = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (greedy.status[i] != ItemStatus::blocked || !Traits::fits(seq[i], cap)) continue;
    if (!found || seq[i] < m) {
      m = seq[i];
      t_m = i;
      found = true;
    }
  }
  if (!found) throw PreconditionError("Greedy blocks no item; the certificate is undefined");

  std::vector<Size> g_prime_items;
  Size g_prime{0};
  for (std::size_t i : greedy.accepted_indices) {
    if (i < t_m) {
      g_prime_items.push_back(seq[i]);
      g_prime += seq[i];
    }
  }
  std::vector<Size> candidates = g_prime_items;
  std::sort(candidates.begin(), candidates.end(), std::greater<Size>());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  bool have_q = false;
  Size q{};
  for (Size cand : candidates) {
    Size above{0};
    for (Size s : g_prime_items) {
      if (s >= cand) above += s;
    }
    if (Traits::exceeds(m + above, cap)) {
      q = cand;
      have_q = true;
      break;
    }
  }
  if (!have_q) throw VerificationError("no threshold blocks the smallest blocked item");

  std::size_t n = 0;
  Size x{0};
  for (Size s : g_prime_items) {
    if (s == q) {
      ++n;
    } else if (s > q) {
      x += s;
    }
  }

  const double c = static_cast<double>(cap);
  BoundCertificate cert;
  cert.m = static_cast<double>(m) / c;
  cert.t_m = t_m;
  cert.g_prime = static_cast<double>(g_prime) / c;
  cert.q = static_cast<double>(q) / c;
  cert.n = n;
  cert.x = static_cast<double>(x) / c;
  cert.nq_plus_x = static_cast<double>(n) * cert.q + cert.x;
  const double f0 = f(0.0);
  cert.bound_small_m = f0 * (1.0 - cert.m) + (f(cert.m) - f0) * std::min(cert.m, 1.0 - cert.m);
  const double fq = f(cert.q);
  cert.bound_large_m = fq * cert.q + (1.0 - fq) * (1.0 - cert.q);
  cert.large_m = cert.m >= 0.5;
  cert.applicable_bound = cert.large_m ? cert.bound_large_m : cert.bound_small_m;
  cert.expected_packed = expected_packed_exact(seq, f).expected_packed / c;
  cert.holds = cert.expected_packed >= cert.applicable_bound - 1e-9;
  return cert;
}

}  // namespace onknap

#endif  // ONKNAP_EVALUATION_HPP
