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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "onknap/evaluation.hpp"

namespace onknap {
namespace {

// Midpoint rule over the quantile function: E = int_0^1 THR(F^-1(u)) du.
double QuantileOracle(const FractionSequence& seq, const ThresholdCdf& f, int grid = 200'000) {
  double sum = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double tau = f.quantile((i + 0.5) / grid);
    sum += simulate_fixed_threshold(seq, tau).packed_total;
  }
  return sum / grid;
}

FractionSequence RandomSequence(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(std::uniform_int_distribution<std::size_t>(1, max_len)(rng));
  for (double& s : v) s = 1.0 - u(rng);
  return FractionSequence::fractions(v);
}

TEST(ExactTest, SpecExamples) {
  const ThresholdCdf f1 = cdf_f1();
  EXPECT_NEAR(expected_packed_exact(FractionSequence::fractions({0.5, 0.6}), f1).expected_packed, 0.5, 1e-15);
  EXPECT_NEAR(expected_packed_exact(FractionSequence::fractions({0.3}), f1).expected_packed, 0.3 * f1(0.3),
              1e-15);
  const double eps = 1e-3;
  const double want = f1(eps) * eps + (1.0 - f1(eps));
  const double got = expected_packed_exact(FractionSequence::fractions({eps, 1.0}), f1).expected_packed;
  EXPECT_NEAR(got, want, 1e-15);
  EXPECT_NEAR(got, 3.0 / 7.0, 1e-3);
}

TEST(ExactTest, SegmentsCoverUnitMass) {
  const auto r = expected_packed_exact(FractionSequence::fractions({0.2, 0.7, 0.2, 0.5}), cdf_f2());
  double mass = 0.0;
  for (const ThresholdSegment& s : r.segments) mass += s.mass;
  EXPECT_NEAR(mass, 1.0, 1e-12);
  EXPECT_EQ(r.method, EvalMethod::exact);
}

TEST(ExactTest, EmptySequenceRejected) {
  EXPECT_THROW(expected_packed_exact(FractionSequence({}, 1.0), cdf_f1()), ArgumentError);
}

TEST(ExactTest, MatchesQuantileOracle) {
  std::mt19937_64 rng(21);
  const ThresholdCdf f1 = cdf_f1();
  const ThresholdCdf f2 = cdf_f2();
  for (int it = 0; it < 30; ++it) {
    const FractionSequence seq = RandomSequence(rng, 12);
    for (const ThresholdCdf* f : {&f1, &f2}) {
      ASSERT_NEAR(expected_packed_exact(seq, *f).expected_packed, QuantileOracle(seq, *f, 20'000), 2e-3);
    }
  }
}

TEST(ExactTest, PointMassIsDeterministicRun) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 200; ++it) {
    const FractionSequence seq = RandomSequence(rng, 20);
    const double tau = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    ASSERT_NEAR(expected_packed_exact(seq, ThresholdCdf::point_mass(tau)).expected_packed,
                simulate_fixed_threshold(seq, tau).packed_total, 1e-12);
  }
}

TEST(ExactTest, UnitModeMatchesScaledFractions) {
  const UnitSequence units({7, 18, 80, 41, 1, 30, 12, 17}, 104);
  const ThresholdCdf f1 = cdf_f1();
  const double e = expected_packed_exact(units, f1).expected_packed;
  EXPECT_GE(e, 3.0 / 7.0 * 104.0);
  EXPECT_LE(e, 104.0);
}

TEST(MonteCarloTest, ZeroVarianceCases) {
  const auto r = expected_packed_mc(FractionSequence::fractions({0.5, 0.6}), cdf_f1(), 100'000, 5);
  EXPECT_DOUBLE_EQ(r.expected_packed, 0.5);
  EXPECT_EQ(r.std_error, 0.0);
  const FractionSequence seq = FractionSequence::fractions({0.4, 0.3, 0.5, 0.2});
  const auto g = expected_packed_mc(seq, ThresholdCdf::point_mass(0.0), 1000, 6);
  EXPECT_NEAR(g.expected_packed, simulate_greedy(seq).packed_total, 1e-15);
}

TEST(MonteCarloTest, SingleItemWithinFourSigma) {
  const ThresholdCdf f1 = cdf_f1();
  const auto r = expected_packed_mc(FractionSequence::fractions({0.3}), f1, 100'000, 7);
  EXPECT_EQ(r.samples, 100'000u);
  EXPECT_LE(std::fabs(r.expected_packed - 0.3 * f1(0.3)), 4.0 * r.std_error);
}

TEST(MonteCarloTest, AgreesWithExactOnRandomPairs) {
  std::mt19937_64 rng(23);
  const ThresholdCdf f1 = cdf_f1();
  const ThresholdCdf f2 = cdf_f2();
  int outside = 0;
  for (int it = 0; it < 100; ++it) {
    const FractionSequence seq = RandomSequence(rng, 15);
    const ThresholdCdf& f = it % 2 ? f1 : f2;
    const auto mc = expected_packed_mc(seq, f, 20'000, 100 + it);
    const double exact = expected_packed_exact(seq, f).expected_packed;
    if (std::fabs(mc.expected_packed - exact) > 4.0 * mc.std_error + 1e-12) ++outside;
  }
  EXPECT_EQ(outside, 0);
}

TEST(MonteCarloTest, ThreadCountDoesNotChangeResult) {
  const FractionSequence seq = FractionSequence::fractions({0.2, 0.45, 0.3, 0.6, 0.1, 0.35});
  const auto one = expected_packed_mc(seq, cdf_f2(), 50'000, 99, 1);
  const auto four = expected_packed_mc(seq, cdf_f2(), 50'000, 99, 4);
  EXPECT_EQ(one.expected_packed, four.expected_packed);
  EXPECT_EQ(one.std_error, four.std_error);
}

TEST(MonteCarloTest, NeedsSamples) {
  EXPECT_THROW(expected_packed_mc(FractionSequence::fractions({0.5}), cdf_f1(), 0, 1), ArgumentError);
}

TEST(CompetitiveTest, Examples) {
  const auto a = competitive_report(FractionSequence::fractions({0.5, 0.6}), cdf_f1());
  EXPECT_NEAR(a.ratio_vs_opt_plus, 0.5, 1e-15);
  EXPECT_NEAR(a.ratio_vs_opt, 0.5 / 0.6, 1e-15);
  EXPECT_NEAR(competitive_report(FractionSequence::fractions({1.0}), cdf_f2()).ratio_vs_opt, 1.0, 1e-15);
  const SolvedConstants k = solve_constants();
  const auto hard = competitive_report(FractionSequence::fractions({1e-3, 1.0}), cdf_f2(k));
  EXPECT_GE(hard.ratio_vs_opt, k.c_star - 1e-9);
}

TEST(CompetitiveTest, GuaranteesOnRandomSequences) {
  std::mt19937_64 rng(24);
  const SolvedConstants k = solve_constants();
  const ThresholdCdf f1 = cdf_f1();
  const ThresholdCdf f2 = cdf_f2(k);
  for (int it = 0; it < 2000; ++it) {
    const FractionSequence seq = RandomSequence(rng, 16);
    const auto r1 = competitive_report(seq, f1);
    ASSERT_GE(r1.expected_packed, 3.0 / 7.0 * r1.opt_plus - 1e-9);
    const auto r2 = competitive_report(seq, f2);
    ASSERT_GE(r2.expected_packed, k.c_star * r2.opt - 1e-9);
    const auto tb = two_bins_report(seq);
    ASSERT_GE(tb.expected_packed, 0.5 * tb.opt_plus - 1e-9);
  }
}

TEST(CertificateTest, LargeBlockedItem) {
  const ThresholdCdf f1 = cdf_f1();
  const auto c = bound_certificate(FractionSequence::fractions({0.5, 0.6}), f1);
  EXPECT_DOUBLE_EQ(c.m, 0.6);
  EXPECT_EQ(c.t_m, 1u);
  EXPECT_DOUBLE_EQ(c.q, 0.5);
  EXPECT_TRUE(c.large_m);
  EXPECT_NEAR(c.bound_large_m, f1(0.5) * 0.5, 1e-15);
  EXPECT_NEAR(c.expected_packed, 0.5, 1e-15);
  EXPECT_TRUE(c.holds);
}

TEST(CertificateTest, QScan) {
  const auto c = bound_certificate(FractionSequence::fractions({0.4, 0.9, 0.8}), cdf_f1());
  EXPECT_DOUBLE_EQ(c.m, 0.8);
  EXPECT_DOUBLE_EQ(c.g_prime, 0.4);
  EXPECT_DOUBLE_EQ(c.q, 0.4);
  EXPECT_EQ(c.n, 1u);
  EXPECT_DOUBLE_EQ(c.x, 0.0);
  EXPECT_TRUE(c.holds);
}

TEST(CertificateTest, SmallBlockedItem) {
  const auto c = bound_certificate(FractionSequence::fractions({0.3, 0.3, 0.45}), cdf_f1());
  EXPECT_DOUBLE_EQ(c.m, 0.45);
  EXPECT_FALSE(c.large_m);
  EXPECT_EQ(c.applicable_bound, c.bound_small_m);
  EXPECT_TRUE(c.holds);
}

TEST(CertificateTest, GreedyBlocksNothing) {
  EXPECT_THROW(bound_certificate(FractionSequence::fractions({0.3, 0.3}), cdf_f1()), PreconditionError);
}

TEST(CertificateTest, HoldsOnRandomSequences) {
  std::mt19937_64 rng(25);
  const ThresholdCdf f1 = cdf_f1();
  int checked = 0;
  for (int it = 0; it < 2000; ++it) {
    const FractionSequence seq = RandomSequence(rng, 20);
    try {
      ASSERT_TRUE(bound_certificate(seq, f1).holds);
      ++checked;
    } catch (const PreconditionError&) {
    }
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
}  // namespace onknap
