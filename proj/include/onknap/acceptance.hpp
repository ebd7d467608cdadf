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

// Acceptance suite: one pass/fail result per guarantee, each with a pinned
// tolerance and runtime limit. Shared by the selftest subcommand and the
// acceptance test binary.

#ifndef ONKNAP_ACCEPTANCE_HPP
#define ONKNAP_ACCEPTANCE_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "onknap/adversarial.hpp"
#include "onknap/core.hpp"
#include "onknap/evaluation.hpp"
#include "onknap/experiments.hpp"
#include "onknap/multiknapsack.hpp"
#include "onknap/optimum.hpp"
#include "onknap/parallel.hpp"
#include "onknap/thresholds.hpp"

namespace onknap {

namespace suites {

/// Uniform (0, 1] sizes, length uniform in [1, max_len].
template <class Rng>
std::vector<double> random_fractions(Rng& rng, std::size_t max_len = 30) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(len(rng));
  for (double& s : v) s = 1.0 - unit(rng);
  return v;
}

/// Sequences whose totals sit just above 1: near-complementary pairs, runs of
/// small items followed by a large one, ascending ladders, and shuffled
/// partitions of 1 + delta.
template <class Rng>
std::vector<double> structured_fractions(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 0.02);
  std::vector<double> v;
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: {
      const double a = 0.05 + 0.9 * unit(rng);
      v = {a, std::min(1.0, 1.0 - a + slack(rng))};
      if (unit(rng) < 0.5) v.push_back(std::min(1.0, a + slack(rng)));
      break;
    }
    case 1: {
      const auto m = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
      const double run = 0.1 + 0.8 * unit(rng);
      for (std::size_t i = 0; i < m; ++i) v.push_back(run / static_cast<double>(m));
      v.push_back(std::min(1.0, 1.0 - run + slack(rng)));
      break;
    }
    case 2: {
      const double start = 0.1 + 0.4 * unit(rng);
      const auto m = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
      v.push_back(start);
      for (std::size_t i = 1; i <= m; ++i) {
        v.push_back(std::min(1.0, 1.0 - start + slack(rng) + (start * static_cast<double>(i)) / static_cast<double>(m)));
      }
      break;
    }
    default: {
      const auto m = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
      std::vector<double> cuts{0.0, 1.0 + slack(rng)};
      for (std::size_t i = 1; i < m; ++i) cuts.push_back(cuts[1] * unit(rng));
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double s = cuts[i + 1] - cuts[i];
        if (s > 1e-6) v.push_back(std::min(1.0, s));
      }
      std::shuffle(v.begin(), v.end(), rng);
      if (v.empty()) v.push_back(1.0);
      break;
    }
  }
  return v;
}

/// The fraction suite: n_random uniform sequences then n_structured near-1 ones.
inline std::vector<FractionSequence> fraction_suite(std::uint64_t seed, std::size_t n_random = 10'000,
                                                    std::size_t n_structured = 1'000) {
  std::mt19937_64 rng(seed);
  std::vector<FractionSequence> out;
  out.reserve(n_random + n_structured);
  for (std::size_t i = 0; i < n_random; ++i) out.push_back(FractionSequence::fractions(random_fractions(rng)));
  for (std::size_t i = 0; i < n_structured; ++i) out.push_back(FractionSequence::fractions(structured_fractions(rng)));
  return out;
}

/// The same shapes rounded to multiples of 1/denominator, in integer units.
inline std::vector<UnitSequence> unit_suite(std::uint64_t seed, std::int64_t denominator = 1000,
                                            std::size_t n_random = 10'000, std::size_t n_structured = 1'000) {
  std::vector<UnitSequence> out;
  out.reserve(n_random + n_structured);
  for (const FractionSequence& f : fraction_suite(seed, n_random, n_structured)) {
    std::vector<std::int64_t> units;
    for (double s : f.sizes()) {
      units.push_back(std::clamp<std::int64_t>(std::llround(s * static_cast<double>(denominator)), 1, denominator));
    }
    out.emplace_back(std::move(units), denominator);
  }
  return out;
}

/// N in [1, 3] unit knapsacks, T in [1, 8] items, entries zero w.p. 1/5 else uniform (0, 1].
template <class Rng>
MultiInstance random_multi(Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  const auto t = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
  std::vector<std::vector<double>> items(t, std::vector<double>(n));
  for (auto& row : items) {
    for (double& s : row) s = unit(rng) < 0.2 ? 0.0 : 1.0 - unit(rng);
  }
  return MultiInstance(std::vector<double>(n, 1.0), std::move(items));
}

}  // namespace suites

/// The published purse order stream as a one-pair dataset.
inline OrderDataset purse_dataset() {
  std::istringstream orders(
      "sku_id,warehouse_id,arrival_index,order_size\n"
      "PURSE,W1,1,7\nPURSE,W1,2,18\nPURSE,W1,3,80\nPURSE,W1,4,41\n"
      "PURSE,W1,5,1\nPURSE,W1,6,30\nPURSE,W1,7,12\nPURSE,W1,8,17\n");
  std::istringstream inventory("sku_id,warehouse_id,initial_inventory\nPURSE,W1,208\n");
  return ingest_csv(orders, inventory);
}

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20260101;
  unsigned threads = 1;
  std::filesystem::path scratch = std::filesystem::temp_directory_path() / "onknap_acceptance";
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Runs one check, timing it and converting exceptions into failures.
inline CriterionResult timed(int id, std::string name, double limit,
                             const std::function<bool(std::string&)>& body) {
  CriterionResult r{id, std::move(name), false, {}, 0.0, limit};
  const auto start = std::chrono::steady_clock::now();
  try {
    r.passed = body(r.detail);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > limit) {
    r.passed = false;
    r.detail += fmt(" (runtime %.3fs over limit %.3fs)", r.seconds, limit);
  }
  return r;
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
  using detail::fmt;
  using detail::timed;
  std::vector<CriterionResult> out;
  const ThresholdCdf f1 = cdf_f1();
  const SolvedConstants k = solve_constants();
  const ThresholdCdf f2 = cdf_f2(k);

  out.push_back(timed(1, "constants q*, c*, H residual", 1e-3, [&](std::string& d) {
    const SolvedConstants s = solve_constants();
    const double h = h_function(s.c_star, s.q_star);
    d = fmt("q*=%.6f c*=%.6f |H|=%.2e", s.q_star, s.c_star, std::fabs(h));
    return std::fabs(s.q_star - 0.31847) <= 5e-5 && std::fabs(s.c_star - 0.43236) <= 5e-5 && std::fabs(h) <= 1e-10;
  }));

  std::vector<FractionSequence> suite;
  out.push_back(timed(2, "F1 >= 3/7 OPT+ on the fraction suite", 30.0, [&](std::string& d) {
    suite = suites::fraction_suite(derive_seed(opt.seed, 2));
    std::size_t bad = 0;
    double worst = 1.0;
    for (const FractionSequence& s : suite) {
      const double e = expected_packed_exact(s, f1).expected_packed;
      const double o = opt_plus(s).value;
      worst = std::min(worst, e / o);
      if (e < 3.0 / 7.0 * o - 1e-9) ++bad;
    }
    d = fmt("%.0f sequences, %.0f violations, min ratio %.6f", static_cast<double>(suite.size()),
            static_cast<double>(bad), worst);
    return bad == 0;
  }));

  out.push_back(timed(3, "F2 >= c* OPT on the unit suite", 120.0, [&](std::string& d) {
    const std::vector<UnitSequence> units = suites::unit_suite(derive_seed(opt.seed, 3));
    std::vector<double> ratios(units.size());
    parallel_for(units.size(), opt.threads, [&](std::size_t i) {
      const double e = expected_packed_exact(units[i], f2).expected_packed;
      const double o = static_cast<double>(opt_dp(units[i]).value);
      ratios[i] = e - k.c_star * o >= -1e-9 * units[i].capacity() ? e / o : -1.0;
    });
    std::size_t bad = 0;
    double worst = 1.0;
    for (double r : ratios) {
      if (r < 0.0) ++bad; else worst = std::min(worst, r);
    }
    d = fmt("%.0f sequences, %.0f violations, min ratio %.6f", static_cast<double>(units.size()),
            static_cast<double>(bad), worst);
    return bad == 0;
  }));

  out.push_back(timed(4, "threshold tightness at 3/7 (eps 1e-3, 1e-4)", 10.0, [&](std::string& d) {
    bool ok = true;
    for (double eps : {1e-3, 1e-4}) {
      const TightnessTable t = verify_thm32(eps);
      const double e = t.unit;
      const double want[4] = {3.0 / 7.0 + 4.0 * e / 7.0, 3.0 / 7.0, 3.0 / 7.0 + 3.0 * e / 7.0, 1.0 / 7.0};
      for (const TightnessRow& r : t.rows) {
        ok = ok && std::fabs(r.closed_form - want[r.case_id - 1]) <= 1e-9 &&
             std::fabs(r.simulated - r.closed_form) <= 1e-9;
      }
      ok = ok && t.max_ratio <= 3.0 / 7.0 + 4.0 * eps / 7.0 + 1e-12;
      d += fmt("eps=%.0e unit=%.6e max=%.9f; ", eps, e, t.max_ratio);
    }
    return ok;
  }));

  out.push_back(timed(5, "threshold tightness at c* (eps 1e-3)", 30.0, [&](std::string& d) {
    const double eps = 1e-3;
    const TightnessTable t = verify_thm34(eps, k);
    const AdversarialDistribution dist = build_thm34(eps, k);
    const double x = dist.parameters.at("x");
    bool ok = std::fabs(t.total_mass - 1.0) <= 1e-6;
    for (const TightnessRow& r : t.rows) {
      if (r.case_id == 2 || r.case_id == 4) ok = ok && std::fabs(r.simulated - k.c_star) <= 1e-7;
      if (r.case_id == 1) ok = ok && r.simulated >= k.c_star - 1e-7 && r.simulated <= k.c_star + eps * (1.0 - x) + 1e-7;
      if (r.case_id == 3) ok = ok && r.simulated >= k.c_star - 1e-7 && r.simulated <= k.c_star + eps * x + 1e-7;
    }
    d = fmt("mass=%.9f max=%.9f bound=%.9f", t.total_mass, t.max_ratio, t.bound);
    return ok;
  }));

  out.push_back(timed(6, "TwoBins >= OPT+/2 on the fraction suite", 30.0, [&](std::string& d) {
    std::size_t bad = 0;
    for (const FractionSequence& s : suite) {
      if (simulate_two_bins(s).expected_packed < 0.5 * opt_plus(s).value - 1e-9) ++bad;
    }
    d = fmt("%.0f sequences, %.0f violations", static_cast<double>(suite.size()), static_cast<double>(bad));
    return !suite.empty() && bad == 0;
  }));

  out.push_back(timed(7, "upper-triangular enumeration (N=4)", 1.0, [&](std::string& d) {
    const double eps = 1e-3;
    const Thm42Table t = enumerate_thm42(4, eps);
    const std::map<std::size_t, std::size_t> h0{{2, 6}, {3, 17}, {4, 1}};
    const std::map<std::size_t, std::size_t> h1{{2, 16}, {3, 8}};
    const std::map<std::size_t, std::size_t> h2{{1, 6}, {2, 18}};
    bool ok = t.rows[0].histogram == h0 && t.rows[1].histogram == h1 && t.rows[2].histogram == h2 &&
              t.rows[0].accepted_sum == 67 && t.rows[1].accepted_sum == 56 && t.rows[2].accepted_sum == 42 &&
              t.rows[0].permutations == 24;
    ok = ok && std::fabs(t.best_ratio - 35.0 / (76.0 - 48.0 * eps)) <= 1e-12;
    const Thm42Table tiny = enumerate_thm42(4, 1e-8);
    ok = ok && std::fabs(tiny.best_ratio - 35.0 / 76.0) <= 1e-6;
    d = fmt("best=%.9f 35/(76-48eps)=%.9f limit=%.9f", t.best_ratio, 35.0 / (76.0 - 48.0 * eps), tiny.best_ratio);
    return ok;
  }));

  out.push_back(timed(8, "combined policy >= 3/14 OPT (1000 instances)", 120.0, [&](std::string& d) {
    std::mt19937_64 rng(derive_seed(opt.seed, 8));
    std::size_t bad = 0;
    double worst = 1.0;
    for (int i = 0; i < 1000; ++i) {
      const GuaranteeCheck g = guarantee_check(suites::random_multi(rng), f1);
      worst = std::min(worst, g.ratio);
      if (g.expected_total < 3.0 / 14.0 * g.opt - 1e-9) ++bad;
    }
    d = fmt("%.0f violations, min ratio %.6f", static_cast<double>(bad), worst);
    return bad == 0;
  }));

  out.push_back(timed(9, "lower-bound certificates (F1)", 30.0, [&](std::string& d) {
    std::size_t checked = 0;
    std::size_t bad = 0;
    for (const FractionSequence& s : suite) {
      const PackingOutcome<double> g = simulate_greedy(s);
      bool blocks = false;
      for (std::size_t i = 0; i < s.size(); ++i) blocks = blocks || g.status[i] == ItemStatus::blocked;
      if (!blocks) continue;
      ++checked;
      if (!bound_certificate(s, f1).holds) ++bad;
    }
    d = fmt("%.0f certificates, %.0f violations", static_cast<double>(checked), static_cast<double>(bad));
    return !suite.empty() && checked > 0 && bad == 0;
  }));

  out.push_back(timed(10, "order-stream pipeline (974 x 21 synthetic, purse)", 300.0, [&](std::string& d) {
    const OrderDataset data = synth_generate(974, 21, opt.seed);
    ExperimentConfig cfg;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    const ExperimentResults res = run_experiment(data, cfg);

    bool fcfs_ok = true;
    for (const SkuPerformance& p : res.per_sku) {
      if (p.alpha == 1.0 && p.policy == "fcfs" && p.ratio != 1.0) fcfs_ok = false;
    }

    // Random threshold in exact expectation on warehouses where OPT = OPT+.
    bool rt_ok = true;
    std::size_t eligible = 0;
    double worst = 1.0;
    const std::vector<OrderStream> streams = data.streams();
    for (double alpha : cfg.alpha_grid) {
      std::string sku;
      double sum = 0.0;
      std::size_t n = 0;
      auto flush = [&] {
        if (n == 0) return;
        const double r = sum / static_cast<double>(n);
        worst = std::min(worst, r);
        if (r < 3.0 / 7.0 - 1e-9) rt_ok = false;
        ++eligible;
      };
      for (const OrderStream& s : streams) {
        if (s.sku_id != sku) {
          flush();
          sku = s.sku_id;
          sum = 0.0;
          n = 0;
        }
        const WarehouseScore w = score_warehouse(s, alpha);
        if (w.opt == 0 || w.opt != w.opt_plus) continue;
        sum += expected_packed_exact(w.sequence, f1).expected_packed / static_cast<double>(w.opt);
        ++n;
      }
      flush();
    }

    const OrderDataset purse = purse_dataset();
    const WarehouseScore pw = score_warehouse(purse.streams().front(), 0.5);
    const bool purse_ok = purse.warnings.empty() && pw.capacity == 104 && pw.opt == 104 &&
                          simulate_greedy(pw.sequence).packed_total == 97;

    const std::filesystem::path a = opt.scratch / "run_a";
    const std::filesystem::path b = opt.scratch / "run_b";
    emit_results(res, a);
    emit_results(run_experiment(data, cfg), b);
    bool same = true;
    for (const char* f : {"per_sku.csv", "aggregate_mean.csv", "aggregate_min.csv"}) {
      const std::string x = detail::slurp(a / f);
      same = same && !x.empty() && x == detail::slurp(b / f);
    }
    std::error_code ec;
    std::filesystem::remove_all(opt.scratch, ec);

    d = "fcfs@1 " + std::string(fcfs_ok ? "ok" : "FAIL") + ", rt_exact " + (rt_ok ? "ok" : "FAIL") +
        fmt(" (%.0f sku/alpha cells, min %.6f)", static_cast<double>(eligible), worst) + ", purse " +
        (purse_ok ? "ok" : "FAIL") + ", csv rerun " + (same ? "identical" : "DIFFERENT");
    return fcfs_ok && rt_ok && eligible > 0 && purse_ok && same;
  }));
  return out;
}

/// "PASS  <id>  <name>  <detail>  <seconds>" lines; returns true when all pass.
inline bool print_acceptance(const std::vector<CriterionResult>& results, std::FILE* out = stdout) {
  bool all = true;
  for (const CriterionResult& r : results) {
    std::fprintf(out, "%s  %2d  %-52s %8.3fs/%gs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                 r.seconds, r.limit_seconds, r.detail.c_str());
    all = all && r.passed;
  }
  std::fprintf(out, "%s: %zu criteria\n", all ? "ALL PASS" : "SOME FAILED", results.size());
  return all;
}

}  // namespace onknap

#endif  // ONKNAP_ACCEPTANCE_HPP
