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

// Return levels from simulated windspeed pools, their confidence intervals
// under parameter uncertainty, and train/test validation of the
// pressure-minimum models on the standard Gumbel scale.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/random.hpp"
#include "hurisk/simulate.hpp"
#include "hurisk/stats.hpp"

namespace hurisk::risk {

inline double quantile_level(int n) {
  if (n < 2) throw std::invalid_argument("return period must be >= 2 years");
  return 1.0 - 1.0 / n;
}

/// (1 - 1/n) quantile of a flat pool, linear interpolation between order
/// statistics.
inline double return_level(std::vector<double> pool, int n) {
  if (pool.empty()) throw DataError("return level: empty windspeed pool");
  return stats::quantile(std::move(pool), quantile_level(n));
}

namespace detail {

// Piecewise-linear empirical CDF through (x_(i), (i-1)/(m-1)); a single
// value is a unit step. Inverting it reproduces the linear-interpolation
// quantile.
inline double ecdf(const std::vector<double>& sorted, double x) {
  const std::size_t m = sorted.size();
  if (x < sorted.front()) return 0.0;
  if (x >= sorted.back()) return 1.0;
  const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x);
  const auto j = static_cast<std::size_t>(hi - sorted.begin());  // sorted[j-1] <= x < sorted[j]
  const double a = sorted[j - 1], b = sorted[j];
  const double w = b > a ? (x - a) / (b - a) : 0.0;
  return (static_cast<double>(j - 1) + w) / static_cast<double>(m - 1);
}

}  // namespace detail

/// (1 - 1/n) quantile of the equal-weight mixture of the yearly empirical
/// distributions for year indices [0, n). Years without samples are left out
/// of the mixture.
inline double return_level_mixture(const simulate::RegionPool& pool, int n) {
  const double p = quantile_level(n);
  std::vector<std::vector<double>> by_year(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < pool.windspeed.size(); ++i)
    if (pool.year[i] >= 0 && pool.year[i] < n) by_year[static_cast<std::size_t>(pool.year[i])].push_back(pool.windspeed[i]);
  std::erase_if(by_year, [](const auto& v) { return v.empty(); });
  if (by_year.empty()) throw DataError("return level: empty windspeed pool");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (auto& v : by_year) {
    std::sort(v.begin(), v.end());
    lo = std::min(lo, v.front());
    hi = std::max(hi, v.back());
  }
  if (by_year.size() == 1) return stats::quantile_sorted(by_year.front(), p);
  auto F = [&](double x) {
    double s = 0.0;
    for (const auto& v : by_year) s += v.size() == 1 ? (x >= v.front() ? 1.0 : 0.0) : detail::ecdf(v, x);
    return s / static_cast<double>(by_year.size());
  };
  // Smallest x with F(x) >= p.
  if (F(lo) >= p) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) >= p ? hi : lo) = mid;
  }
  return hi;
}

struct ReturnLevelEstimate {
  std::string region;
  int horizon = 0;
  double r_n = std::nan("");
  double ci_low = std::nan("");
  double ci_high = std::nan("");
  double quantile_level = 0.0;
  std::size_t pool_size = 0;
  double sigma_q = std::nan("");  // sd of the perturbed-parameter quantiles
  double raw_low = std::nan("");  // 2.5% and 97.5% of those quantiles
  double raw_high = std::nan("");
  std::size_t draws = 0;
};

/// center +/- z_{0.975} sigma_q / sqrt(m) over m perturbed quantiles.
inline void normal_ci(ReturnLevelEstimate& est, std::span<const double> quantiles) {
  est.draws = quantiles.size();
  if (quantiles.empty()) return;
  std::vector<double> q(quantiles.begin(), quantiles.end());
  est.sigma_q = q.size() > 1 ? std::sqrt(stats::variance(q)) : 0.0;
  const double half = stats::normal_quantile(0.975) * est.sigma_q / std::sqrt(static_cast<double>(q.size()));
  est.ci_low = est.r_n - half;
  est.ci_high = est.r_n + half;
  std::sort(q.begin(), q.end());
  est.raw_low = stats::quantile_sorted(q, 0.025);
  est.raw_high = stats::quantile_sorted(q, 0.975);
}

/// Return levels for every region and horizon of one simulation. Regions
/// with an empty pool get NaN.
inline std::vector<ReturnLevelEstimate> return_levels(const simulate::SimulationResult& sim,
                                                      std::span<const int> horizons) {
  std::vector<ReturnLevelEstimate> out;
  for (std::size_t r = 0; r < sim.regions.size(); ++r)
    for (int n : horizons) {
      if (n > sim.years) throw ConfigError("horizon " + std::to_string(n) + " exceeds the simulated years");
      ReturnLevelEstimate e;
      e.region = sim.regions[r];
      e.horizon = n;
      e.quantile_level = quantile_level(n);
      const auto& pool = sim.pools[r];
      e.pool_size = static_cast<std::size_t>(std::count_if(pool.year.begin(), pool.year.end(), [n](int y) { return y < n; }));
      if (e.pool_size) e.r_n = return_level_mixture(pool, n);
      out.push_back(e);
    }
  return out;
}

/// Independent normal perturbation of every fitted parameter by its standard
/// error. Coefficients held fixed (zero standard error) stay put.
inline simulate::SimulationModels perturb_models(const simulate::SimulationModels& m, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  auto draw = [&](double v, double se) { return se > 0.0 ? v + se * z(rng) : v; };
  auto out = m;
  for (auto* g : {&out.landfalling, &out.nonlandfalling}) {
    auto c = g->coef.as_array();
    const auto s = g->se.as_array();
    for (std::size_t i = 0; i < 6; ++i) c[i] = draw(c[i], std::isfinite(s[i]) ? s[i] : 0.0);
    g->coef = evt::Coefficients::from_array(c);
  }
  out.rate.a = std::max(draw(m.rate.a, m.rate.se_a), 1e-12);
  out.rate.b = draw(m.rate.b, m.rate.se_b);
  for (auto* r : {&out.range_landfalling, &out.range_nonlandfalling}) {
    const auto base = *r;
    r->a = draw(base.a, base.se_a);
    r->b = draw(base.b, base.se_b);
    double c = draw(base.c, base.se_c);
    for (int i = 0; i < 100 && !(c > 0.0); ++i) c = draw(base.c, base.se_c);
    r->c = c > 0.0 ? c : base.c;
  }
  return out;
}

struct CiOptions {
  int draws = 100;
  int trials = 100;  // per draw
  std::uint64_t seed = 0;
};

/// Re-simulates under `opt.draws` perturbed parameter sets and attaches a
/// normal-theory interval around each central estimate. A failing draw is
/// retried once with a fresh substream, then skipped.
inline std::vector<ReturnLevelEstimate> return_level_ci(std::vector<ReturnLevelEstimate> central,
                                                        std::span<const int> horizons,
                                                        const simulate::SimulationConfig& base_cfg,
                                                        const simulate::SimulationModels& models,
                                                        const simulate::HistoricalData& hist,
                                                        const coast::CoastGrid& grid,
                                                        const windfield::WindfieldConfig& wind,
                                                        const CiOptions& opt, std::size_t* skipped_draws = nullptr) {
  if (opt.draws < 1 || opt.trials < 1) throw ConfigError("ci.draws and ci.trials must be >= 1");
  const int years = *std::max_element(horizons.begin(), horizons.end());
  std::vector<std::vector<double>> q(central.size());
  std::size_t skipped = 0;
  for (int d = 0; d < opt.draws; ++d) {
    bool done = false;
    for (int attempt = 0; attempt < 2 && !done; ++attempt) {
      try {
        auto rng = substream(opt.seed, {0xC1, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(attempt)});
        const auto pm = perturb_models(models, rng);
        auto cfg = base_cfg;
        cfg.trials = opt.trials;
        cfg.years = years;
        cfg.seed = rng();
        const auto sim = simulate::simulate_years(cfg, pm, hist, grid, wind);
        const auto est = return_levels(sim, horizons);
        for (std::size_t i = 0; i < est.size() && i < central.size(); ++i)
          if (std::isfinite(est[i].r_n)) q[i].push_back(est[i].r_n);
        done = true;
      } catch (const std::exception&) {
      }
    }
    if (!done) ++skipped;
  }
  if (skipped_draws) *skipped_draws = skipped;
  for (std::size_t i = 0; i < central.size(); ++i) normal_ci(central[i], q[i]);
  return central;
}

/// Models for the stationary baseline: the nested stationary pressure-minimum
/// fits and a constant occurrence rate.
inline simulate::SimulationModels stationary_baseline(const simulate::SimulationModels& models,
                                                      const evt::NsGevModel& stationary_landfalling,
                                                      const evt::NsGevModel& stationary_nonlandfalling,
                                                      double constant_rate) {
  if (!stationary_landfalling.stationary || !stationary_nonlandfalling.stationary)
    throw ConfigError("baseline needs stationary pressure-minimum models");
  if (!(constant_rate > 0.0)) throw ConfigError("baseline rate must be positive");
  auto out = models;
  out.landfalling = stationary_landfalling;
  out.nonlandfalling = stationary_nonlandfalling;
  out.rate.a = constant_rate;
  out.rate.b = 0.0;
  out.rate.se_a = out.rate.se_b = 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Train/test validation.

struct ValidationOptions {
  std::size_t min_training_events = 30;
  int replicates = 1000;
  double band = 0.95;
  std::uint64_t seed = 0;
  int base_year = kBaseYear;
};

struct ValidationReport {
  evt::ModelKind kind = evt::ModelKind::landfalling;
  int horizon = 0;
  int split_year = 0;  // last training year
  int last_year = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  evt::NsGevModel model;
  std::vector<double> z;                  // standardized test events, event order
  std::vector<double> plotting_position;  // i / (m + 1)
  std::vector<double> model_quantile;     // standard Gumbel quantile
  std::vector<double> band_low;
  std::vector<double> band_high;
  std::vector<double> observed;  // sorted z
  double coverage = 0.0;         // fraction of observed points inside the band
};

/// Standardized value with points outside the fitted support sent to the
/// matching infinity.
inline double standardize_or_inf(double x, const evt::Covariates& c, const evt::NsGevModel& model) {
  try {
    return evt::standardize(x, c, model);
  } catch (const DataError&) {
    return model.coef.k0 < 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  }
}

namespace detail {

// Draws theta ~ N(theta_hat, Sigma) through the symmetric square root so
// that singular rows (fixed coefficients) are respected.
class CoefficientSampler {
 public:
  explicit CoefficientSampler(const evt::NsGevModel& m) : mean_(m.coef.as_array()) {
    Eigen::Matrix<double, 6, 6> cov = Eigen::Matrix<double, 6, 6>::Zero();
    if (m.covariance.size() == 36)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) cov(i, j) = m.covariance[static_cast<std::size_t>(i * 6 + j)];
    if (!cov.allFinite()) throw FitError("validation: model covariance is not finite");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(cov);
    const auto ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = es.eigenvectors() * ev.asDiagonal();
  }
  std::array<double, 6> operator()(Rng& rng) const {
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::Matrix<double, 6, 1> e;
    for (int i = 0; i < 6; ++i) e(i) = z(rng);
    const Eigen::Matrix<double, 6, 1> d = root_ * e;
    auto out = mean_;
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] += d(i);
    return out;
  }

 private:
  std::array<double, 6> mean_;
  Eigen::Matrix<double, 6, 6> root_;
};

}  // namespace detail

/// Fits the model on years <= last - n + 1, standardizes the later events
/// with it and compares their Gumbel quantile plot with a parametric band:
/// each replicate draws coefficients from the fitted normal approximation,
/// simulates one value per test event at its covariates and standardizes
/// with the point estimate.
inline ValidationReport validate_split(const std::vector<hurdat2::HurricaneEvent>& events, int n,
                                       evt::ModelKind kind, const ValidationOptions& opt = {},
                                       std::optional<int> last_year = std::nullopt) {
  if (n < 2) throw ConfigError("validation horizon must be >= 2");
  if (events.empty()) throw DataError("validation: no events");
  int first = events.front().year, last = events.front().year;
  for (const auto& e : events) {
    first = std::min(first, e.year);
    last = std::max(last, e.year);
  }
  if (last_year) last = *last_year;
  ValidationReport rep;
  rep.kind = kind;
  rep.horizon = n;
  rep.last_year = last;
  rep.split_year = last - n + 1;
  if (rep.split_year < first || rep.split_year >= last)
    throw DataError("validation: split year " + std::to_string(rep.split_year) + " outside the data range");

  std::vector<hurdat2::HurricaneEvent> train, test;
  for (const auto& e : events) {
    if (e.year <= rep.split_year) train.push_back(e);
    else if (e.year <= last) test.push_back(e);
  }
  const auto tr = gev_sample(train, kind, opt.base_year);
  const auto te = gev_sample(test, kind, opt.base_year);
  rep.n_train = tr.size();
  rep.n_test = te.size();
  if (tr.size() < opt.min_training_events)
    throw DataError("validation: " + std::to_string(tr.size()) + " training events, need " +
                    std::to_string(opt.min_training_events));
  if (te.size() < 2) throw DataError("validation: fewer than two test events");

  rep.model = evt::fit_nonstationary_gev(tr.data, tr.covariates, kind);
  for (std::size_t i = 0; i < te.size(); ++i)
    rep.z.push_back(standardize_or_inf(te.data[i], te.covariates[i], rep.model));

  const std::size_t m = te.size();
  rep.observed = rep.z;
  std::sort(rep.observed.begin(), rep.observed.end());
  for (std::size_t i = 0; i < m; ++i) {
    const double pp = static_cast<double>(i + 1) / static_cast<double>(m + 1);
    rep.plotting_position.push_back(pp);
    rep.model_quantile.push_back(evt::gumbel_quantile(pp));
  }

  const detail::CoefficientSampler sampler(rep.model);
  std::vector<std::vector<double>> order(m);
  auto rng = substream(opt.seed, {0x7A11, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(n)});
  evt::NsGevModel draw_model = rep.model;
  std::vector<double> zs(m);
  for (int b = 0; b < opt.replicates; ++b) {
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      draw_model.coef = evt::Coefficients::from_array(sampler(rng));
      ok = std::all_of(te.covariates.begin(), te.covariates.end(),
                       [&](const auto& c) { return draw_model.realize(c).valid(); });
    }
    if (!ok) throw FitError("validation: could not draw valid coefficients");
    for (std::size_t i = 0; i < m; ++i) {
      const double x = evt::sample_gev(draw_model.realize(te.covariates[i]), rng);
      zs[i] = standardize_or_inf(x, te.covariates[i], rep.model);
    }
    std::sort(zs.begin(), zs.end());
    for (std::size_t i = 0; i < m; ++i) order[i].push_back(zs[i]);
  }
  const double tail = (1.0 - opt.band) / 2.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::sort(order[i].begin(), order[i].end());
    rep.band_low.push_back(stats::quantile_sorted(order[i], tail));
    rep.band_high.push_back(stats::quantile_sorted(order[i], 1.0 - tail));
    if (rep.observed[i] >= rep.band_low[i] && rep.observed[i] <= rep.band_high[i]) ++inside;
  }
  rep.coverage = static_cast<double>(inside) / static_cast<double>(m);
  return rep;
}

}  // namespace hurisk::risk
