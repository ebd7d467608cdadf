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


#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "onknap/adversarial.hpp"
#include "onknap/optimum.hpp"

namespace onknap {
namespace {

double Opt(const std::vector<double>& sizes) { return opt_grouped(FractionSequence::fractions(sizes)).value; }

double Packed(const std::vector<double>& sizes, double tau) {
  return simulate_fixed_threshold(FractionSequence::fractions(sizes), tau).packed_total;
}

TEST(Thm32Test, Structure) {
  const AdversarialDistribution d = build_thm32(1e-3);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-15);
  const double e = d.parameters.at("unit");
  EXPECT_LE(e, 1e-3);
  EXPECT_NEAR(e, 2.0 / (3.0 * d.parameters.at("k")), 1e-18);
  ASSERT_EQ(d.branches.size(), 3u);
  for (const SequenceBranch& b : d.branches) {
    double sum = 0.0;
    for (double s : b.sizes) sum += s;
    EXPECT_GT(sum, 1.0);  // OPT+ = 1 on every branch
  }
  EXPECT_EQ(d.branches[1].sizes.size(), static_cast<std::size_t>(d.parameters.at("k")) + 2);
}

TEST(Thm32Test, ClosedFormMatchesBranchSimulation) {
  const AdversarialDistribution d = build_thm32(1e-3);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double tau = u(rng);
    double sim = 0.0;
    for (const SequenceBranch& b : d.branches) sim += b.probability * Packed(b.sizes, tau);
    ASSERT_NEAR(thm32_closed_form(d, tau), sim, 1e-12) << tau;
  }
}

TEST(Thm32Test, VerifiedTable) {
  const TightnessTable t = verify_thm32(1e-3);
  EXPECT_EQ(t.rows.size(), 8u);
  EXPECT_NEAR(t.max_ratio, 3.0 / 7.0 + 4.0 * t.unit / 7.0, 1e-12);
  EXPECT_LE(t.max_ratio, t.bound + 1e-12);
  EXPECT_NEAR(t.max_ratio, 0.429142, 1e-6);
  EXPECT_THROW(verify_thm32(0.02), ArgumentError);
  EXPECT_THROW(verify_thm32(0.0), ArgumentError);
}

TEST(Thm32Test, SamplingFrequencies) {
  const AdversarialDistribution d = build_thm32(1e-2);
  std::mt19937_64 rng(42);
  int counts[3] = {0, 0, 0};
  const int n = 70'000;
  for (int i = 0; i < n; ++i) {
    const FractionSequence s = d.sample(rng);
    if (s.size() == 2 && s[0] == 1.0 / 3.0) {
      ++counts[0];
    } else if (s.size() > 2) {
      ++counts[1];
    } else {
      ++counts[2];
    }
  }
  EXPECT_NEAR(counts[0] / double(n), 3.0 / 7.0, 0.01);
  EXPECT_NEAR(counts[1] / double(n), 3.0 / 7.0, 0.01);
  EXPECT_NEAR(counts[2] / double(n), 1.0 / 7.0, 0.01);
  EXPECT_THROW(d.sample_instance(rng), ArgumentError);
}

class Thm34Test : public ::testing::Test {
 protected:
  SolvedConstants k_ = solve_constants();
  AdversarialDistribution d_ = build_thm34(1e-3, k_);
};

TEST_F(Thm34Test, Parameters) {
  EXPECT_NEAR(d_.parameters.at("x"), 0.3726, 5e-5);
  EXPECT_NEAR(d_.parameters.at("y"), 0.4248, 5e-5);
  EXPECT_NEAR(d_.parameters.at("z"), k_.c_star - d_.parameters.at("x"), 1e-15);
  EXPECT_GT(d_.parameters.at("z"), 0.0);
  EXPECT_LE(d_.parameters.at("unit"), 1e-3);
  EXPECT_LE(d_.parameters.at("step"), 1e-3);
  EXPECT_NEAR(d_.total_mass(), 1.0, 1e-6);
}

TEST_F(Thm34Test, ContinuousMassByMidpointRule) {
  const ContinuousBranch& cb = *d_.continuous;
  const int grid = 100'000;
  double mass = 0.0;
  for (int i = 0; i < grid; ++i) mass += cb.density(cb.lo + (i + 0.5) * (cb.hi - cb.lo) / grid);
  EXPECT_NEAR(mass * (cb.hi - cb.lo) / grid, cb.mass, 1e-9);
  EXPECT_NEAR(cb.inverse_cdf(0.0), cb.lo, 1e-15);
  EXPECT_NEAR(cb.inverse_cdf(1.0), cb.hi, 1e-15);
}

TEST_F(Thm34Test, EveryRealizationHasOptOne) {
  const std::vector<double>& ladder = d_.branches[0].sizes;
  EXPECT_DOUBLE_EQ(ladder.back(), 1.0);
  // Any two ladder items overflow, so OPT is the largest item.
  EXPECT_GT(ladder[0] + ladder[1], 1.0);
  EXPECT_NEAR(Opt(d_.branches[1].sizes), 1.0, 1e-12);
  EXPECT_NEAR(Opt(d_.branches[2].sizes), 1.0, 1e-12);
  const ContinuousBranch& cb = *d_.continuous;
  for (int i = 0; i <= 200; ++i) {
    const double s = cb.lo + (cb.hi - cb.lo) * i / 200.0;
    ASSERT_NEAR(Opt(cb.realize(s)), 1.0, 1e-12) << s;
  }
}

TEST_F(Thm34Test, ClosedFormMatchesMidpointOracle) {
  const ContinuousBranch& cb = *d_.continuous;
  for (double tau : {0.0, 0.05, 0.3, 0.5, 0.69, 0.75, 1.0}) {
    double total = 0.0;
    for (const SequenceBranch& b : d_.branches) total += b.probability * Packed(b.sizes, tau);
    const int grid = 20'000;
    const double h = (cb.hi - cb.lo) / grid;
    for (int i = 0; i < grid; ++i) {
      const double s = cb.lo + (i + 0.5) * h;
      total += Packed(cb.realize(s), tau) * cb.density(s) * h;
    }
    EXPECT_NEAR(thm34_closed_form(d_, tau), total, 2e-4) << tau;
    EXPECT_NEAR(simulate_mixture(d_, tau), thm34_closed_form(d_, tau), 1e-7) << tau;
  }
  EXPECT_THROW(thm34_closed_form(d_, 0.5 * d_.parameters.at("unit")), ArgumentError);
}

TEST_F(Thm34Test, NoThresholdBeatsCStarByMuch) {
  const double bound = k_.c_star + 1e-3 * (1.0 - d_.parameters.at("x"));
  for (int i = 1; i <= 400; ++i) {
    const double tau = 0.002 + 0.998 * i / 400.0;
    ASSERT_LE(thm34_closed_form(d_, tau), bound + 1e-9) << tau;
    ASSERT_GE(thm34_closed_form(d_, tau), k_.c_star - 1e-9) << tau;
  }
  EXPECT_LE(thm34_closed_form(d_, 0.0), bound + 1e-9);
}

TEST_F(Thm34Test, VerifiedTable) {
  const TightnessTable t = verify_thm34(1e-3, k_);
  EXPECT_EQ(t.rows.size(), 10u);
  for (const TightnessRow& r : t.rows) {
    if (r.case_id == 2 || r.case_id == 4) {
      EXPECT_NEAR(r.simulated, k_.c_star, 1e-7);
    }
  }
  EXPECT_LE(t.max_ratio, t.bound + t.tolerance);
}

TEST_F(Thm34Test, SamplesAreValidSequences) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 500; ++i) {
    const FractionSequence s = d_.sample(rng);
    ASSERT_FALSE(s.empty());
    ASSERT_LE(opt_plus(s).value, 1.0);
  }
}

TEST(Thm42Test, Structure) {
  const AdversarialDistribution d = build_thm42(4, 1e-3);
  ASSERT_EQ(d.multi.size(), 25u);
  EXPECT_NEAR(d.total_mass(), 1.0, 1e-12);
  EXPECT_NEAR(d.parameters.at("continue_prob"), 12e-3 / 7.0, 1e-18);
  for (const MultiBranch& b : d.multi) {
    EXPECT_EQ(b.instance.items(), b.phase_two ? 8u : 4u);
    EXPECT_EQ(b.instance.knapsacks(), 4u);
  }
  EXPECT_THROW(build_thm42(1, 1e-3), ArgumentError);
  EXPECT_THROW(build_thm42(9, 1e-3), ArgumentError);
  EXPECT_THROW(build_thm42(4, 1e-3, 1.5), ArgumentError);
}

TEST(Thm42Test, ExpectedOptFromExhaustiveSearch) {
  const AdversarialDistribution d = build_thm42(4, 1e-3);
  double e_opt = 0.0;
  for (const MultiBranch& b : d.multi) e_opt += b.probability * opt_multi(b.instance).value;
  EXPECT_NEAR(e_opt, d.parameters.at("expected_opt"), 1e-12);
}

TEST(Thm42Test, EnumerationMatchesLimit) {
  for (double eps : {1e-2, 1e-3, 1e-6}) {
    const Thm42Table t = enumerate_thm42(4, eps);
    ASSERT_TRUE(t.bound.has_value());
    EXPECT_NEAR(t.best_ratio, 35.0 / (76.0 - 48.0 * eps), 1e-12);
    ASSERT_EQ(t.rows.size(), 5u);
    for (const Thm42Row& r : t.rows) {
      std::size_t count = 0;
      std::size_t sum = 0;
      for (const auto& [accepted, perms] : r.histogram) {
        count += perms;
        sum += accepted * perms;
      }
      EXPECT_EQ(count, 24u);
      EXPECT_EQ(sum, r.accepted_sum);
    }
  }
  EXPECT_NEAR(enumerate_thm42(4, 1e-8).best_ratio, 35.0 / 76.0, 1e-8);
}

TEST(Thm42Test, PhaseTwoNeverExceedsFreeKnapsacks) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const Thm42Table t = enumerate_thm42(n, 1e-3);
    for (const Thm42Row& r : t.rows) {
      EXPECT_LE(r.histogram.rbegin()->first, n);
      EXPECT_GE(r.histogram.begin()->first, n - r.e >= 1 ? 1u : 0u);
    }
    EXPECT_FALSE(t.bound.has_value() && n != 4);
  }
}

TEST(Thm42Test, SampleInstance) {
  const AdversarialDistribution d = build_thm42(3, 1e-2);
  std::mt19937_64 rng(44);
  int phase_two = 0;
  for (int i = 0; i < 20'000; ++i) phase_two += d.sample_instance(rng).items() > 3;
  EXPECT_NEAR(phase_two / 20'000.0, 12e-2 / 7.0, 0.005);
  EXPECT_THROW(d.sample(rng), ArgumentError);
}

}  // namespace
}  // namespace onknap
