//
// Copyright 2026 The hurisk Authors
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
//

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hurisk/occurrence.hpp"
#include "hurisk/stats.hpp"

using namespace hurisk;
using namespace hurisk::occurrence;

namespace {

hurdat2::YearlyCounts poisson_counts(int first, int years, double a, double b, std::uint64_t seed, int base = 1851) {
  hurdat2::YearlyCounts c{first, {}};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < years; ++i) {
    std::poisson_distribution<int> P(a * std::exp(b * (first + i - base)));
    c.counts.push_back(P(rng));
  }
  return c;
}

}  // namespace

TEST(SlidingRate, ConstantCounts) {
  hurdat2::YearlyCounts c{1900, std::vector<int>(30, 2)};
  const auto r = sliding_rate(c, 20);
  ASSERT_EQ(r.lambda_hat.size(), 11u);
  EXPECT_EQ(r.window_end_years.front(), 1919);
  EXPECT_EQ(r.window_end_years.back(), 1929);
  for (std::size_t i = 0; i < r.lambda_hat.size(); ++i) {
    EXPECT_EQ(r.lambda_hat[i], 2.0);
    EXPECT_DOUBLE_EQ(r.se[i], std::sqrt(40.0) / 20.0);
    EXPECT_FALSE(r.zero[i]);
  }
}

TEST(SlidingRate, AllZeroFlagged) {
  const auto r = sliding_rate({1900, std::vector<int>(25, 0)}, 20);
  ASSERT_EQ(r.lambda_hat.size(), 6u);
  for (std::size_t i = 0; i < r.lambda_hat.size(); ++i) {
    EXPECT_EQ(r.lambda_hat[i], 0.0);
    EXPECT_TRUE(r.zero[i]);
  }
  EXPECT_THROW(sliding_rate({1900, {1, 2}}, 1), ConfigError);
}

TEST(SlidingRate, TrailingWindowByHand) {
  hurdat2::YearlyCounts c{2000, {1, 0, 3, 5, 2}};
  const auto r = sliding_rate(c, 3);
  EXPECT_EQ(r.window_end_years, (std::vector<int>{2002, 2003, 2004}));
  EXPECT_EQ(r.lambda_hat, (std::vector<double>{4.0 / 3, 8.0 / 3, 10.0 / 3}));
  EXPECT_DOUBLE_EQ(mean_rate(r, 2003, 2004), 3.0);
  EXPECT_TRUE(std::isnan(mean_rate(r, 1900, 1901)));
}

// One 100-year series has se(b) near 0.0016, so each fit is held to its own
// 3-se band and the 0.002 bound is applied to the mean over replicates.
TEST(ExponentialRate, ConstantRateGivesFlatModel) {
  const int reps = 20;
  double b_sum = 0;
  for (int r = 0; r < reps; ++r) {
    const auto c = poisson_counts(1900, 100, 5.0, 0.0, 1 + static_cast<std::uint64_t>(r), 1900);
    const auto m = fit_exponential_rate(c, 1900);
    EXPECT_NEAR(m.b, 0.0, 3 * m.se_b);
    EXPECT_NEAR(m.a, 5.0, 3 * m.se_a);
    b_sum += m.b;
  }
  EXPECT_LT(std::abs(b_sum / reps), 0.002);
}

TEST(ExponentialRate, RecoversGrowingRate) {
  const auto c = poisson_counts(1851, 169, 1.0, 0.02, 2);
  const auto m = fit_exponential_rate(c);
  EXPECT_NEAR(m.a, 1.0, 3 * m.se_a);
  EXPECT_NEAR(m.b, 0.02, 3 * m.se_b);
  EXPECT_LT(m.ci_a_low, m.a);
  EXPECT_GT(m.ci_b_high, m.b);
}

TEST(ExponentialRate, ScoreIsZeroAtOptimum) {
  const auto c = poisson_counts(1851, 169, 1.024, 0.015, 3);
  const auto m = fit_exponential_rate(c);
  double s0 = 0, s1 = 0;
  for (std::size_t i = 0; i < c.counts.size(); ++i) {
    const double t = static_cast<double>(i);
    const double mu = m.a * std::exp(m.b * t);
    s0 += c.counts[i] - mu;
    s1 += t * (c.counts[i] - mu);
  }
  EXPECT_NEAR(s0, 0.0, 1e-6);
  EXPECT_NEAR(s1, 0.0, 1e-4);
}

TEST(ExponentialRate, ReindexingEquivariance) {
  const auto c = poisson_counts(1851, 169, 1.024, 0.015, 4);
  const auto m0 = fit_exponential_rate(c, 1851);
  const int shift = 50;
  const auto m1 = fit_exponential_rate(c, 1851 + shift);
  EXPECT_NEAR(m1.b, m0.b, 1e-9);
  EXPECT_NEAR(m1.a, m0.a * std::exp(m0.b * shift), 1e-8 * m1.a);
  EXPECT_NEAR(m1.rate_for_year(1990), m0.rate_for_year(1990), 1e-8);
}

TEST(ExponentialRate, NeedsTwoNonzeroYears) {
  EXPECT_THROW(fit_exponential_rate({1900, {0, 0, 3, 0}}), FitError);
}

TEST(SampleCount, MeanAtTable3Rate) {
  const RateModel m{1.024, 0.015};
  const double mean = 1.024 * std::exp(0.015 * 168);
  auto rng = substream(1, {});
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_event_count(168, m, rng);
  EXPECT_NEAR(stats::mean(x), mean, 3 * std::sqrt(mean / 1e5));
  EXPECT_NEAR(mean, 12.7, 0.1);
}

TEST(SampleCount, Equidispersion) {
  for (double lambda : {0.5, 5.45, 12.7}) {
    const RateModel m{lambda, 0.0};
    auto rng = substream(2, {static_cast<std::uint64_t>(lambda * 100)});
    std::vector<double> x(100000);
    for (auto& v : x) v = sample_event_count(0, m, rng);
    const double ratio = stats::variance(x) / stats::mean(x);
    EXPECT_GE(ratio, 0.97) << lambda;
    EXPECT_LE(ratio, 1.03) << lambda;
  }
}

TEST(SampleCount, TinyRateAndDeterminism) {
  const RateModel tiny{1e-12, 0.0};
  auto rng = substream(3, {});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_event_count(10, tiny, rng), 0);
  auto a = substream(4, {7}), b = substream(4, {7});
  const RateModel m{1.024, 0.015};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_event_count(i, m, a), sample_event_count(i, m, b));
  EXPECT_THROW(sample_event_count(-1, m, a), std::invalid_argument);
}
