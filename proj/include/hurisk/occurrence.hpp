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

#pragma once

// Poisson occurrence model for yearly event counts with an exponential
// rate lambda(t_yr) = a * exp(b * t_yr).

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/hurdat2.hpp"
#include "hurisk/random.hpp"
#include "hurisk/stats.hpp"

namespace hurisk::occurrence {

struct RateSeries {
  std::vector<int> window_end_years;
  std::vector<double> lambda_hat;
  std::vector<double> se;
  std::vector<bool> zero;  // window saw no events
};

/// Trailing-window Poisson rate: events in [end - window + 1, end] divided by
/// the window length, with standard error sqrt(total) / window.
inline RateSeries sliding_rate(const hurdat2::YearlyCounts& counts, int window_years) {
  if (window_years < 2) throw ConfigError("rate window must be >= 2 years");
  RateSeries r;
  const int n = static_cast<int>(counts.counts.size());
  long long total = 0;
  for (int i = 0; i < n; ++i) {
    total += counts.counts[static_cast<std::size_t>(i)];
    if (i >= window_years) total -= counts.counts[static_cast<std::size_t>(i - window_years)];
    if (i + 1 < window_years) continue;
    const double w = static_cast<double>(window_years);
    r.window_end_years.push_back(counts.first_year + i);
    r.lambda_hat.push_back(static_cast<double>(total) / w);
    r.se.push_back(std::sqrt(static_cast<double>(total)) / w);
    r.zero.push_back(total == 0);
  }
  return r;
}

/// Mean of the windowed estimates whose end year lies in [from, to].
inline double mean_rate(const RateSeries& r, int from, int to) {
  double s = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < r.window_end_years.size(); ++i)
    if (r.window_end_years[i] >= from && r.window_end_years[i] <= to) {
      s += r.lambda_hat[i];
      ++n;
    }
  return n ? s / n : std::nan("");
}

struct RateModel {
  double a = 1.0;
  double b = 0.0;
  double se_a = 0.0;
  double se_b = 0.0;
  double ci_a_low = 0.0, ci_a_high = 0.0;
  double ci_b_low = 0.0, ci_b_high = 0.0;
  double loglik = 0.0;
  int base_year = kBaseYear;
  int iterations = 0;

  [[nodiscard]] double rate(double t_yr) const { return a * std::exp(b * t_yr); }
  [[nodiscard]] double rate_for_year(int year) const { return rate(static_cast<double>(year - base_year)); }
};

/// Poisson maximum likelihood for yearly counts with log-linear mean
/// log(a) + b * t_yr (Newton iterations with step halving). Wald 95%
/// intervals use the inverse Fisher information.
inline RateModel fit_exponential_rate(const hurdat2::YearlyCounts& counts, int base_year = kBaseYear) {
  std::vector<double> t, y;
  int nonzero = 0;
  for (std::size_t i = 0; i < counts.counts.size(); ++i) {
    t.push_back(static_cast<double>(counts.first_year + static_cast<int>(i) - base_year));
    y.push_back(counts.counts[i]);
    if (counts.counts[i] > 0) ++nonzero;
  }
  if (nonzero < 2) throw FitError("exponential rate fit needs >= 2 years with events");

  auto loglik = [&](double la, double b) {
    double ll = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double eta = la + b * t[i];
      ll += y[i] * eta - std::exp(eta) - std::lgamma(y[i] + 1.0);
    }
    return ll;
  };

  double la = std::log(stats::mean(y)), b = 0.0;
  double ll = loglik(la, b);
  RateModel m;
  m.base_year = base_year;
  Eigen::Matrix2d info;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d score = Eigen::Vector2d::Zero();
    info.setZero();
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double mu = std::exp(la + b * t[i]);
      score(0) += y[i] - mu;
      score(1) += t[i] * (y[i] - mu);
      info(0, 0) += mu;
      info(0, 1) += t[i] * mu;
      info(1, 1) += t[i] * t[i] * mu;
    }
    info(1, 0) = info(0, 1);
    const Eigen::Vector2d delta = info.ldlt().solve(score);
    double step = 1.0;
    double la_new = la, b_new = b, ll_new = ll;
    for (int h = 0; h < 50; ++h) {
      la_new = la + step * delta(0);
      b_new = b + step * delta(1);
      ll_new = loglik(la_new, b_new);
      if (std::isfinite(ll_new) && ll_new >= ll - 1e-12) break;
      step *= 0.5;
    }
    const bool small = std::abs(la_new - la) < 1e-12 * std::max(1.0, std::abs(la)) &&
                       std::abs(b_new - b) < 1e-14 * std::max(1.0, std::abs(b)) + 1e-14;
    la = la_new;
    b = b_new;
    ll = ll_new;
    m.iterations = it + 1;
    if (small || std::abs(delta(0)) + std::abs(delta(1)) < 1e-13) {
      converged = true;
      break;
    }
  }
  if (!converged || !std::isfinite(ll)) throw FitError("exponential rate fit did not converge");

  // Information at the optimum.
  info.setZero();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double mu = std::exp(la + b * t[i]);
    info(0, 0) += mu;
    info(0, 1) += t[i] * mu;
    info(1, 1) += t[i] * t[i] * mu;
  }
  info(1, 0) = info(0, 1);
  const Eigen::Matrix2d cov = info.inverse();
  m.a = std::exp(la);
  m.b = b;
  m.se_a = m.a * std::sqrt(cov(0, 0));  // delta method
  m.se_b = std::sqrt(cov(1, 1));
  const double z = stats::normal_quantile(0.975);
  m.ci_a_low = m.a - z * m.se_a;
  m.ci_a_high = m.a + z * m.se_a;
  m.ci_b_low = m.b - z * m.se_b;
  m.ci_b_high = m.b + z * m.se_b;
  m.loglik = ll;
  return m;
}

/// Poisson draw with mean a * exp(b * t_yr).
inline int sample_event_count(double t_yr, const RateModel& model, Rng& rng) {
  if (t_yr < 0) throw std::invalid_argument("sample_event_count: t_yr must be >= 0");
  const double mean = model.rate(t_yr);
  if (!(mean > 1e-300)) return 0;
  std::poisson_distribution<int> dist(mean);
  return dist(rng);
}

}  // namespace hurisk::occurrence
