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

// Sliding-window coefficient series and the trend / variance / mean tests
// used to motivate the time-dependent pressure-minimum models.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/parallel.hpp"
#include "hurisk/stats.hpp"

namespace hurisk::trend {

struct WindowOptions {
  int window_years = 40;
  int step_years = 1;
  std::size_t min_events = 20;  // windows with fewer events are flagged unreliable
  int first_year = 0;           // 0: earliest event year
  int last_year = 0;            // 0: latest event year
  int base_year = kBaseYear;
  unsigned workers = 1;
};

struct WindowFit {
  int start_year = 0;
  int end_year = 0;
  std::size_t n_events = 0;
  bool reliable = false;
  bool fitted = false;
  evt::Coefficients coef;
  double loglik = 0.0;
};

/// Fits the stationary covariate model (time coefficient held at zero) inside
/// each trailing window [end - window + 1, end].
inline std::vector<WindowFit> sliding_window_fit(const std::vector<hurdat2::HurricaneEvent>& events,
                                                 evt::ModelKind kind, const WindowOptions& opt = {}) {
  if (opt.window_years < 10) throw ConfigError("window_years must be >= 10");
  if (opt.step_years < 1) throw ConfigError("step_years must be >= 1");
  const GevSample all = gev_sample(events, kind, opt.base_year);
  if (all.size() == 0) return {};
  const auto [lo, hi] = std::minmax_element(all.years.begin(), all.years.end());
  const int first = opt.first_year ? opt.first_year : *lo;
  const int last = opt.last_year ? opt.last_year : *hi;
  if (last - first + 1 < opt.window_years) return {};

  std::vector<WindowFit> out;
  for (int end = first + opt.window_years - 1; end <= last; end += opt.step_years)
    out.push_back({end - opt.window_years + 1, end, 0, false, false, {}, 0.0});

  parallel_for(out.size(), opt.workers, [&](std::size_t w) {
    auto& fit = out[w];
    std::vector<double> data;
    std::vector<evt::Covariates> covs;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all.years[i] >= fit.start_year && all.years[i] <= fit.end_year) {
        data.push_back(all.data[i]);
        covs.push_back(all.covariates[i]);
      }
    fit.n_events = data.size();
    fit.reliable = fit.n_events >= opt.min_events;
    try {
      evt::RegressionFitOptions fo;
      fo.optimizer.restarts = 3;
      const auto m = evt::fit_gev_regression(data, covs, kind, true, fo);
      fit.coef = m.coef;
      fit.loglik = m.loglik;
      fit.fitted = true;
    } catch (const Error&) {
      fit.reliable = false;
      fit.fitted = false;
    }
  });
  return out;
}

struct ParamSeries {
  std::string label;
  evt::Covariates covariates;
  std::vector<int> window_end_years;
  std::vector<double> values;
};

struct RealizedSeries {
  std::vector<ParamSeries> location;
  std::vector<ParamSeries> scale;
};

/// Location and scale time series realized at each sampled covariate. The
/// landfalling scale depends on no covariate, so it yields a single series.
/// Windows that could not be fitted (or are below `from_year`) are omitted.
inline RealizedSeries realize_param_series(const std::vector<WindowFit>& fits, evt::ModelKind kind,
                                           const std::vector<evt::Covariates>& sample, int from_year = 0) {
  RealizedSeries out;
  evt::NsGevModel shape;
  shape.kind = kind;
  shape.stationary = true;
  auto build = [&](const evt::Covariates& c, bool location, std::string label) {
    ParamSeries s{std::move(label), c, {}, {}};
    for (const auto& f : fits) {
      if (!f.fitted || f.end_year < from_year) continue;
      shape.coef = f.coef;
      const auto p = shape.realize(c);
      s.window_end_years.push_back(f.end_year);
      s.values.push_back(location ? p.mu : p.sigma);
    }
    return s;
  };
  for (std::size_t i = 0; i < sample.size(); ++i)
    out.location.push_back(build(sample[i], true, "location#" + std::to_string(i)));
  if (kind == evt::ModelKind::landfalling) {
    out.scale.push_back(build(sample.empty() ? evt::Covariates{} : sample.front(), false, "scale"));
  } else {
    for (std::size_t i = 0; i < sample.size(); ++i)
      out.scale.push_back(build(sample[i], false, "scale#" + std::to_string(i)));
  }
  return out;
}

namespace detail {
inline int sign(double v) { return (v > 0) - (v < 0); }

inline long long s_statistic(std::span<const double> x) {
  long long s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) s += sign(x[j] - x[i]);
  return s;
}

// Sum over tie groups of g(t) for group sizes t.
template <class G>
double tie_sum(std::span<const double> x, G g) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    sum += g(static_cast<double>(j - i));
    i = j;
  }
  return sum;
}
}  // namespace detail

/// Kendall's tau-b between the series and its time index.
inline double kendall_tau_b(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("kendall_tau_b needs at least 2 values");
  const double n = static_cast<double>(x.size());
  const double n0 = n * (n - 1.0) / 2.0;
  const double n1 = detail::tie_sum(x, [](double t) { return t * (t - 1.0) / 2.0; });
  if (n0 - n1 <= 0.0) throw DegenerateDataError("kendall_tau_b: all values tied");
  return static_cast<double>(detail::s_statistic(x)) / std::sqrt(n0 * (n0 - n1));
}

enum class Trend { increasing, decreasing, none };

inline const char* to_string(Trend t) {
  switch (t) {
    case Trend::increasing: return "increasing";
    case Trend::decreasing: return "decreasing";
    default: return "none";
  }
}

struct MkResult {
  long long s = 0;
  double variance = 0.0;
  double z = 0.0;
  double tau_b = 0.0;
  double p_value = 1.0;
  bool exact = false;
  Trend trend = Trend::none;
};

/// Two-sided Mann-Kendall test. Series of length <= exact_max use the exact
/// permutation distribution of S; longer ones the tie-corrected normal
/// approximation with continuity correction.
inline MkResult mann_kendall_test(std::span<const double> x, double alpha = 0.05, std::size_t exact_max = 10) {
  if (x.size() < 4) throw std::invalid_argument("mann_kendall_test needs at least 4 values");
  MkResult r;
  r.tau_b = kendall_tau_b(x);
  r.s = detail::s_statistic(x);
  const double n = static_cast<double>(x.size());
  r.variance = (n * (n - 1.0) * (2.0 * n + 5.0) -
                detail::tie_sum(x, [](double t) { return t * (t - 1.0) * (2.0 * t + 5.0); })) /
               18.0;
  if (r.s > 0) r.z = (static_cast<double>(r.s) - 1.0) / std::sqrt(r.variance);
  if (r.s < 0) r.z = (static_cast<double>(r.s) + 1.0) / std::sqrt(r.variance);

  if (x.size() <= exact_max) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const long long target = std::llabs(r.s);
    double hits = 0.0, total = 0.0;
    do {
      total += 1.0;
      if (std::llabs(detail::s_statistic(v)) >= target) hits += 1.0;
    } while (std::next_permutation(v.begin(), v.end()));
    r.p_value = hits / total;
    r.exact = true;
  } else {
    r.p_value = std::min(1.0, 2.0 * (1.0 - stats::normal_cdf(std::abs(r.z))));
  }
  if (r.p_value < alpha) r.trend = r.s > 0 ? Trend::increasing : Trend::decreasing;
  return r;
}

/// Two-sided F-test for equal variances.
inline double f_test_equal_variance(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("f_test needs >= 2 values per sample");
  const double va = stats::variance(a), vb = stats::variance(b);
  if (!(va > 0.0) || !(vb > 0.0)) throw DegenerateDataError("f_test: zero variance sample");
  boost::math::fisher_f_distribution<double> f(static_cast<double>(a.size() - 1),
                                               static_cast<double>(b.size() - 1));
  const double c = boost::math::cdf(f, va / vb);
  return std::min(1.0, 2.0 * std::min(c, 1.0 - c));
}

/// Two-sided Welch t-test for equal means.
inline double t_test_equal_means(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t_test needs >= 2 values per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double va = stats::variance(a) / na, vb = stats::variance(b) / nb;
  if (!(va + vb > 0.0)) throw DegenerateDataError("t_test: zero variance in both samples");
  const double t = (stats::mean(a) - stats::mean(b)) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  boost::math::students_t_distribution<double> dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

struct RecentSplit {
  std::vector<double> recent;   // years >= cutoff
  std::vector<double> earlier;  // years < cutoff
  int cutoff = 0;
};

/// Pressure minima of one kind split into the last `recent_years` years of
/// the record versus everything earlier.
inline RecentSplit split_recent(const std::vector<hurdat2::HurricaneEvent>& events, evt::ModelKind kind,
                                int recent_years = 40, int last_year = 0) {
  RecentSplit s;
  if (last_year == 0)
    for (const auto& e : events) last_year = std::max(last_year, e.year);
  s.cutoff = last_year - recent_years + 1;
  for (const auto& e : events) {
    if (!matches(e, kind) || e.year > last_year) continue;
    (e.year >= s.cutoff ? s.recent : s.earlier).push_back(e.p_min);
  }
  return s;
}

}  // namespace hurisk::trend
