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

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <iostream>
#include <random>

#include "hurisk/evt.hpp"
#include "hurisk/stats.hpp"

using namespace hurisk;
using namespace hurisk::evt;

namespace {

// Density written out directly from the formula, independent of the library.
double hand_log_density(double x, double mu, double sigma, double k) {
  const double t = 1.0 + k * (x - mu) / sigma;
  return -std::log(sigma) - (1.0 + 1.0 / k) * std::log(t) - std::pow(t, -1.0 / k);
}

double analytic_var(const GevParams& p) {
  const double g1 = std::tgamma(1.0 - p.k), g2 = std::tgamma(1.0 - 2.0 * p.k);
  return p.sigma * p.sigma * (g2 - g1 * g1) / (p.k * p.k);
}

std::vector<double> draws(const GevParams& p, std::size_t n, std::uint64_t seed) {
  auto rng = substream(seed, {n});
  std::vector<double> x(n);
  for (auto& v : x) v = sample_gev(p, rng);
  return x;
}

}  // namespace

TEST(GevCdf, AtLocationIsExpMinusOne) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(-1000, 1000), sg(0.1, 50), k(-0.8, 0.8);
  for (int i = 0; i < 200; ++i) {
    const GevParams p{mu(rng), sg(rng), k(rng)};
    EXPECT_DOUBLE_EQ(gev_cdf(p.mu, p), std::exp(-1.0));
  }
  EXPECT_DOUBLE_EQ(gev_cdf(0.0, {0.0, 1.0, 0.0}), std::exp(-1.0));
}

TEST(GevCdf, QuadratureOracle) {
  const GevParams p{0.0, 1.0, -0.13};
  auto pdf = [](double x) { return std::exp(hand_log_density(x, 0.0, 1.0, -0.13)); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(pdf, -12.0, 2.0, 15, 1e-14);
  EXPECT_NEAR(gev_cdf(2.0, p), integral, 1e-10);
}

TEST(GevCdf, GumbelLimitIsContinuous) {
  for (double x : {-2.0, 0.0, 0.7, 3.0}) {
    EXPECT_NEAR(gev_cdf(x, {0, 1, 1e-5}), gev_cdf(x, {0, 1, 0}), 1e-4);
    EXPECT_NEAR(gev_cdf(x, {0, 1, -1e-5}), gev_cdf(x, {0, 1, 0}), 1e-4);
  }
}

TEST(GevCdf, OutsideSupportAndBadScale) {
  EXPECT_EQ(gev_cdf(100.0, {0, 1, -0.2}), 1.0);  // above the upper endpoint 5
  EXPECT_EQ(gev_cdf(-100.0, {0, 1, 0.2}), 0.0);  // below the lower endpoint -5
  EXPECT_THROW(gev_cdf(0.0, {0, 0, 0.1}), std::invalid_argument);
  EXPECT_THROW(gev_cdf(0.0, {0, -1, 0.1}), std::invalid_argument);
}

TEST(GevCdf, MonotoneOnRandomGrids) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mu(-50, 50), sg(0.5, 20), k(-0.6, 0.6), x(-200, 200);
  for (int rep = 0; rep < 100; ++rep) {
    const GevParams p{mu(rng), sg(rng), k(rng)};
    std::vector<double> xs(60);
    for (auto& v : xs) v = x(rng);
    std::sort(xs.begin(), xs.end());
    double prev = 0.0;
    for (double v : xs) {
      const double c = gev_cdf(v, p);
      EXPECT_GE(c, prev);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      prev = c;
    }
  }
}

TEST(GevLikelihood, SingleDatumAtMode) {
  const GevParams p{-980, 15, -0.13};
  const double m = gev_mode(p);
  const double x[] = {m};
  EXPECT_NEAR(gev_neg_log_likelihood(x, p), -std::log(gev_pdf(m, p)), 1e-12);
  // the mode maximizes the density
  EXPECT_GT(gev_pdf(m, p), gev_pdf(m + 0.01, p));
  EXPECT_GT(gev_pdf(m, p), gev_pdf(m - 0.01, p));
}

TEST(GevLikelihood, OutsideSupportIsInfinite) {
  const double x[] = {-980.0, 0.0};
  EXPECT_EQ(gev_neg_log_likelihood(x, GevParams{-980, 15, -0.13}), std::numeric_limits<double>::infinity());
}

TEST(GevLikelihood, HandSummedFiveData) {
  const std::vector<double> x{-1000.0, -990.0, -985.5, -970.0, -962.0};
  const std::vector<GevParams> ps{{-985, 12, -0.1}, {-980, 14, -0.13}, {-990, 10, 0.05}, {-975, 16, -0.2}, {-970, 9, 0.2}};
  double want = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) want -= hand_log_density(x[i], ps[i].mu, ps[i].sigma, ps[i].k);
  EXPECT_NEAR(gev_neg_log_likelihood(x, ps), want, 1e-10);
}

TEST(GevSample, InverseCdfAtLocation) {
  const GevParams p{-980, 15, -0.13};
  EXPECT_NEAR(gev_quantile(std::exp(-1.0), p), p.mu, 1e-12);
}

TEST(GevSample, MeanMatchesGammaFormula) {
  const GevParams p{0.0, 1.0, -0.13};
  const auto x = draws(p, 100000, 21);
  const double se = std::sqrt(analytic_var(p) / 100000.0);
  EXPECT_NEAR(stats::mean(x), gev_mean(p), 3.0 * se);
}

TEST(GevSample, Deterministic) {
  const GevParams p{-980, 15, -0.13};
  EXPECT_EQ(draws(p, 50, 9), draws(p, 50, 9));
}

TEST(GevFit, RecoversParametersAt10000) {
  const GevParams truth{-980, 15, -0.13};
  const auto x = draws(truth, 10000, 1);
  const auto f = fit_stationary_gev(x);
  EXPECT_TRUE(f.convergence.converged);
  EXPECT_NEAR(f.params.mu, truth.mu, 3 * f.se.mu);
  EXPECT_NEAR(f.params.sigma, truth.sigma, 3 * f.se.sigma);
  EXPECT_NEAR(f.params.k, truth.k, 3 * f.se.k);
}

TEST(GevFit, ConstantDataIsDegenerate) {
  const std::vector<double> x(50, -990.0);
  EXPECT_THROW(fit_stationary_gev(x), DegenerateDataError);
  EXPECT_THROW(fit_stationary_gev(std::vector<double>(5, 1.0)), FitError);
}

TEST(GevFit, LoglikConsistentWithLikelihood) {
  const std::vector<double> pmin{-940, -955, -962, -948, -975, -990, -931, -967, -958, -944,
                                 -980, -951, -936, -970, -962, -985, -947, -953, -977, -960};
  const auto f = fit_stationary_gev(pmin);
  EXPECT_NEAR(f.loglik, -gev_neg_log_likelihood(pmin, f.params), 1e-9);
}

TEST(GevFit, ErrorShrinksWithSampleSize) {
  const GevParams truth{-980, 15, -0.13};
  auto err = [&](std::size_t n) {
    double e = 0.0;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto f = fit_stationary_gev(draws(truth, n, 100 + s));
      e += std::abs(f.params.mu - truth.mu) / truth.sigma + std::abs(f.params.sigma - truth.sigma) / truth.sigma +
           std::abs(f.params.k - truth.k);
    }
    return e;
  };
  const double e500 = err(500), e5000 = err(5000), e50000 = err(50000);
  EXPECT_LT(e5000, e500);
  EXPECT_LT(e50000, e5000);
}

TEST(NsGev, RealizesModelFormulas) {
  NsGevModel lf{ModelKind::landfalling, false, {-1078.97, 32.87, -0.52, 12.47, 0.07, -0.13}, {}, {}, 0, 0, {}};
  const Covariates c{30, 27.5, 100};
  const auto p = lf.realize(c);
  EXPECT_NEAR(p.mu, -1078.97 + 32.87 * std::log(30.0) - 0.52 * 27.5, 1e-12);
  EXPECT_NEAR(p.sigma, 12.47 + 0.07 * 100, 1e-12);
  EXPECT_EQ(p.k, -0.13);
  NsGevModel nl{ModelKind::nonlandfalling, false, {-1027.13, 27.40, -11.47, 20.48, -0.16, -0.13}, {}, {}, 0, 0, {}};
  const auto q = nl.realize(c);
  EXPECT_NEAR(q.mu, -1027.13 + 27.40 * std::log(30.0) - 11.47 * std::log(100.0), 1e-12);
  EXPECT_NEAR(q.sigma, 20.48 - 0.16 * 27.5, 1e-12);
  EXPECT_FALSE(nl.admits({30, 27.5, 0}));
}

// 12 coefficients per replicate at a 3-se band: a single replicate fails
// about 3% of the time by chance alone, so several replicates are fitted and
// at most one band miss in total is tolerated. The MLE must also beat the
// true coefficients on likelihood every time.
TEST(NsGev, RecoversSyntheticCoefficients) {
  const int reps = 5;
  int misses = 0;
  for (auto kind : {ModelKind::landfalling, ModelKind::nonlandfalling}) {
    NsGevModel truth{kind, false, {}, {}, {}, 0, 0, {}};
    truth.coef = kind == ModelKind::landfalling ? Coefficients{-1078.97, 32.87, -0.52, 12.47, 0.07, -0.13}
                                                : Coefficients{-1027.13, 27.40, -11.47, 20.48, -0.16, -0.13};
    for (int r = 0; r < reps; ++r) {
      auto rng = substream(77 + static_cast<std::uint64_t>(r), {static_cast<std::uint64_t>(kind)});
      std::uniform_int_distribution<int> T(25, 60), yr(1, 168);
      std::uniform_real_distribution<double> phi(15, 40);
      std::vector<double> data;
      std::vector<Covariates> covs;
      for (int i = 0; i < 1000; ++i) {
        const Covariates c{T(rng), std::round(phi(rng) * 10) / 10, yr(rng)};
        covs.push_back(c);
        data.push_back(sample_gev(truth.realize(c), rng));
      }
      const auto fit = fit_nonstationary_gev(data, covs, kind);
      double ll_truth = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i)
        ll_truth -= gev_neg_log_likelihood(std::span<const double>(&data[i], 1), truth.realize(covs[i]));
      EXPECT_GE(fit.loglik, ll_truth - 1e-6) << to_string(kind) << " replicate " << r;
      const auto est = fit.coef.as_array(), se = fit.se.as_array(), want = truth.coef.as_array();
      for (std::size_t i = 0; i < 6; ++i) {
        ASSERT_GT(se[i], 0.0);
        if (std::abs(est[i] - want[i]) > 3 * se[i]) {
          ++misses;
          std::cout << to_string(kind) << " " << Coefficients::names[i] << " replicate " << r
                    << " outside 3 se\n";
        }
      }
      if (r == 0) {
        // nested stationary model: time coefficient held at zero, lower likelihood
        const auto st = fit_gev_regression(data, covs, kind, true);
        EXPECT_EQ(st.coef.as_array()[time_coefficient(kind)], 0.0);
        EXPECT_LE(st.loglik, fit.loglik + 1e-6);
      }
    }
  }
  EXPECT_LE(misses, 1);
}

TEST(NsGev, NegativeScaleAtStartIsRejected) {
  std::vector<double> data(40);
  std::vector<Covariates> covs(40);
  for (int i = 0; i < 40; ++i) {
    covs[static_cast<std::size_t>(i)] = {30, 25.0, i + 1};
    data[static_cast<std::size_t>(i)] = -990.0 + i;
  }
  covs[0].lifetime = 0;
  EXPECT_THROW(fit_gev_regression(data, covs, ModelKind::landfalling, false), DataError);
}

TEST(Lrt, EqualLoglikIsZero) {
  for (double l : {-1000.0, 0.0, 12.5})
    for (int d : {1, 2, 3}) {
      const auto r = likelihood_ratio_test(l, l, d);
      EXPECT_EQ(r.statistic, 0.0);
      EXPECT_FALSE(r.significant);
    }
  EXPECT_NEAR(likelihood_ratio_test(0, 0, 1).threshold, 3.841458820694124, 1e-9);
}

TEST(Lrt, SignificanceAndOrdering) {
  const auto r = likelihood_ratio_test(-2000.0, -2000.0 + 15.62 / 2, 1);
  EXPECT_NEAR(r.statistic, 15.62, 1e-9);
  EXPECT_TRUE(r.significant);
  EXPECT_THROW(likelihood_ratio_test(-100.0, -110.0, 1), FitError);
  EXPECT_THROW(likelihood_ratio_test(0, 0, 0), std::invalid_argument);
}

TEST(Standardize, LocationMapsToZero) {
  NsGevModel m{ModelKind::landfalling, false, {-1078.97, 32.87, -0.52, 12.47, 0.07, -0.13}, {}, {}, 0, 0, {}};
  const Covariates c{40, 30.0, 150};
  EXPECT_NEAR(standardize(m.realize(c).mu, c, m), 0.0, 1e-15);
  EXPECT_THROW(standardize(0.0, c, m), DataError);
}

TEST(Standardize, RoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> k(-0.5, 0.5), z(-3, 3), phi(15, 40);
  std::uniform_int_distribution<int> T(25, 80), yr(1, 200);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    NsGevModel m{i % 2 ? ModelKind::landfalling : ModelKind::nonlandfalling, false,
                 {-1050, 30, i % 2 ? -0.5 : -10.0, 15, i % 2 ? 0.05 : -0.1, k(rng)}, {}, {}, 0, 0, {}};
    const Covariates c{T(rng), phi(rng), yr(rng)};
    if (!(m.realize(c).sigma > 0)) continue;
    const double z0 = z(rng);
    const double x = inverse_standardize(z0, c, m);
    worst = std::max(worst, std::abs(standardize(x, c, m) - z0));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Standardize, SamplesAreStandardGumbel) {
  NsGevModel m{ModelKind::nonlandfalling, false, {-1027.13, 27.40, -11.47, 20.48, -0.16, -0.13}, {}, {}, 0, 0, {}};
  auto rng = substream(8, {});
  std::uniform_int_distribution<int> T(25, 60), yr(1, 168);
  std::uniform_real_distribution<double> phi(15, 40);
  std::vector<double> z;
  for (int i = 0; i < 10000; ++i) {
    const Covariates c{T(rng), phi(rng), yr(rng)};
    z.push_back(standardize(sample_gev(m.realize(c), rng), c, m));
  }
  EXPECT_GT(stats::ks_test(z, gumbel_cdf).p_value, 0.05);
}
