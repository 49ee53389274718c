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

// Generalized extreme value (GEV) distribution and covariate-dependent
// maximum likelihood fitting.
//
// Convention: G(x) = exp{-[1 + k (x - mu) / sigma]^(-1/k)} on
// 1 + k (x - mu) / sigma > 0. k < 0 gives a bounded upper tail; |k| below
// kGumbelThreshold switches to the Gumbel formulas.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hurisk/error.hpp"
#include "hurisk/optimize.hpp"
#include "hurisk/random.hpp"
#include "hurisk/stats.hpp"

namespace hurisk::evt {

inline constexpr double kGumbelThreshold = 1e-6;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double k = 0.0;

  [[nodiscard]] bool valid() const noexcept { return sigma > 0.0 && std::isfinite(mu) && std::isfinite(k); }
  /// Asymptotic normality of the MLE is not guaranteed here.
  [[nodiscard]] bool irregular() const noexcept { return k <= -0.5; }
};

namespace detail {
inline void require_valid(const GevParams& p) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("GEV scale must be positive");
}
}  // namespace detail

inline double gev_cdf(double x, const GevParams& p) {
  detail::require_valid(p);
  const double z = (x - p.mu) / p.sigma;
  if (std::abs(p.k) < kGumbelThreshold) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.k * z;
  if (t <= 0.0) return p.k > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / p.k));
}

/// log density; -inf outside the support.
inline double gev_log_pdf(double x, const GevParams& p) {
  if (!(p.sigma > 0.0)) return -kInf;
  const double z = (x - p.mu) / p.sigma;
  if (std::abs(p.k) < kGumbelThreshold) return -std::log(p.sigma) - z - std::exp(-z);
  const double t = 1.0 + p.k * z;
  if (t <= 0.0) return -kInf;
  const double lt = std::log(t);
  return -std::log(p.sigma) - (1.0 + 1.0 / p.k) * lt - std::exp(-lt / p.k);
}

inline double gev_pdf(double x, const GevParams& p) { return std::exp(gev_log_pdf(x, p)); }

inline double gev_quantile(double u, const GevParams& p) {
  detail::require_valid(p);
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("GEV quantile level must lie in (0, 1)");
  const double y = -std::log(u);
  if (std::abs(p.k) < kGumbelThreshold) return p.mu - p.sigma * std::log(y);
  return p.mu + p.sigma * (std::pow(y, -p.k) - 1.0) / p.k;
}

/// Mode of the density.
inline double gev_mode(const GevParams& p) {
  if (std::abs(p.k) < kGumbelThreshold) return p.mu;
  return p.mu + p.sigma * (std::pow(1.0 + p.k, -p.k) - 1.0) / p.k;
}

/// Mean, finite for k < 1.
inline double gev_mean(const GevParams& p) {
  if (std::abs(p.k) < kGumbelThreshold) return p.mu + p.sigma * 0.57721566490153286;
  if (p.k >= 1.0) return kInf;
  return p.mu + p.sigma * (std::tgamma(1.0 - p.k) - 1.0) / p.k;
}

/// Inverse-CDF draw.
inline double sample_gev(const GevParams& p, Rng& rng) { return gev_quantile(uniform_open(rng), p); }

/// Sum of per-datum negative log densities; +inf if any datum is outside its
/// support.
inline double gev_neg_log_likelihood(std::span<const double> data, std::span<const GevParams> params) {
  if (data.size() != params.size()) throw std::invalid_argument("data/params size mismatch");
  double nll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double lp = gev_log_pdf(data[i], params[i]);
    if (!std::isfinite(lp)) return kInf;
    nll -= lp;
  }
  return nll;
}

inline double gev_neg_log_likelihood(std::span<const double> data, const GevParams& p) {
  double nll = 0.0;
  for (double x : data) {
    const double lp = gev_log_pdf(x, p);
    if (!std::isfinite(lp)) return kInf;
    nll -= lp;
  }
  return nll;
}

/// Probability-weighted-moment estimate (Hosking, Wallis & Wood).
inline GevParams pwm_estimate(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double b0 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double j = static_cast<double>(i);
    b0 += x[i];
    b1 += x[i] * j / (n - 1.0);
    b2 += x[i] * j * (j - 1.0) / ((n - 1.0) * (n - 2.0));
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;
  const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  double kh = 7.8590 * c + 2.9554 * c * c;  // Hosking's sign: kh = -k
  GevParams p;
  if (!std::isfinite(kh) || std::abs(kh) < 1e-6) {
    p.sigma = (2.0 * b1 - b0) / std::log(2.0);
    p.mu = b0 - 0.57721566490153286 * p.sigma;
    p.k = 0.0;
  } else {
    kh = std::clamp(kh, -0.9, 0.9);
    const double g = std::tgamma(1.0 + kh);
    p.sigma = (2.0 * b1 - b0) * kh / (g * (1.0 - std::pow(2.0, -kh)));
    p.mu = b0 + p.sigma * (g - 1.0) / kh;
    p.k = -kh;
  }
  if (!(p.sigma > 0.0) || !std::isfinite(p.mu)) {
    const double sd = std::sqrt(stats::variance(x));
    p = {stats::mean(x) - 0.45 * sd, 0.78 * sd, 0.0};
  }
  return p;
}

struct FitOptions {
  std::size_t min_size = 10;
  optimize::NelderMeadOptions optimizer{};
  double hessian_step = 1e-4;
};

struct StationaryFit {
  GevParams params;
  GevParams se;
  double loglik = 0.0;
  optimize::Convergence convergence;
};

namespace detail {
inline void check_data(std::span<const double> data, std::size_t min_size) {
  if (data.size() < min_size)
    throw FitError("GEV fit needs at least " + std::to_string(min_size) + " data, got " +
                   std::to_string(data.size()));
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi) throw DegenerateDataError("GEV fit on constant data");
  for (double v : data)
    if (!std::isfinite(v)) throw FitError("GEV fit on non-finite data");
}
}  // namespace detail

inline StationaryFit fit_stationary_gev(std::span<const double> data, const FitOptions& opt = {}) {
  detail::check_data(data, opt.min_size);
  const GevParams init = pwm_estimate({data.begin(), data.end()});
  auto nll = [&](const std::vector<double>& th) {
    return gev_neg_log_likelihood(data, GevParams{th[0], th[1], th[2]});
  };
  std::vector<double> x0{init.mu, init.sigma, std::clamp(init.k, -0.45, 0.45)};
  if (!std::isfinite(nll(x0))) x0[2] = 0.0;
  const auto m = optimize::nelder_mead(nll, x0, {0.2 * init.sigma, 0.2 * init.sigma, 0.05}, opt.optimizer);
  if (!std::isfinite(m.value))
    throw FitError("stationary GEV fit failed to find a feasible point");
  StationaryFit fit;
  fit.params = {m.x[0], m.x[1], m.x[2]};
  fit.loglik = -m.value;
  fit.convergence = m.convergence;
  Eigen::MatrixXd cov;
  optimize::covariance_from_hessian(optimize::numerical_hessian(nll, m.x, opt.hessian_step), cov);
  fit.se = {std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)), std::sqrt(cov(2, 2))};
  if (!fit.convergence.converged)
    throw FitError("stationary GEV fit did not converge (best loglik " + std::to_string(fit.loglik) +
                   ", mu " + std::to_string(fit.params.mu) + ", sigma " +
                   std::to_string(fit.params.sigma) + ", k " + std::to_string(fit.params.k) + ")");
  return fit;
}

// ---------------------------------------------------------------------------
// Covariate-dependent models for the negated pressure minimum.

enum class ModelKind { landfalling, nonlandfalling };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::landfalling ? "landfalling" : "nonlandfalling";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "landfalling") return ModelKind::landfalling;
  if (s == "nonlandfalling") return ModelKind::nonlandfalling;
  throw ConfigError("unknown model kind '" + s + "'");
}

struct Covariates {
  int lifetime = 1;       // T
  double phi_pmin = 0.0;  // latitude of the pressure minimum, degrees
  int t_yr = 0;           // year - 1851
};

/// Coefficients in a fixed order: mu0, mu1, mu2, sigma0, sigma1, k0.
struct Coefficients {
  double mu0 = 0, mu1 = 0, mu2 = 0, sigma0 = 1, sigma1 = 0, k0 = 0;

  static constexpr std::array<const char*, 6> names{"mu0", "mu1", "mu2", "sigma0", "sigma1", "k0"};

  [[nodiscard]] std::array<double, 6> as_array() const { return {mu0, mu1, mu2, sigma0, sigma1, k0}; }
  static Coefficients from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

/// Index of the coefficient that carries the calendar-year dependence.
inline constexpr std::size_t time_coefficient(ModelKind kind) { return kind == ModelKind::landfalling ? 4 : 2; }

/// Landfalling:    mu = mu0 + mu1 log T + mu2 phi,      sigma = sigma0 + sigma1 t_yr
/// Nonlandfalling: mu = mu0 + mu1 log T + mu2 log t_yr, sigma = sigma0 + sigma1 phi
/// Both use a constant shape k0. The stationary variant fixes the time
/// coefficient at zero.
struct NsGevModel {
  ModelKind kind = ModelKind::landfalling;
  bool stationary = false;
  Coefficients coef;
  Coefficients se;
  std::vector<double> covariance;  // 6x6 row major; zero rows for fixed coefficients
  double loglik = 0.0;
  std::size_t n = 0;
  optimize::Convergence convergence;

  [[nodiscard]] std::array<double, 3> location_design(const Covariates& c) const {
    const double second = kind == ModelKind::landfalling ? c.phi_pmin
                                                         : (c.t_yr >= 1 ? std::log(static_cast<double>(c.t_yr)) : std::nan(""));
    return {1.0, std::log(static_cast<double>(c.lifetime)), second};
  }
  [[nodiscard]] double scale_covariate(const Covariates& c) const {
    return kind == ModelKind::landfalling ? static_cast<double>(c.t_yr) : c.phi_pmin;
  }

  /// Whether the covariates can be realized by this model.
  [[nodiscard]] bool admits(const Covariates& c) const {
    if (c.lifetime < 1) return false;
    if (kind == ModelKind::nonlandfalling && !stationary && c.t_yr < 1) return false;
    return true;
  }

  [[nodiscard]] GevParams realize(const Covariates& c) const {
    const auto d = location_design(c);
    double mu = coef.mu0 + coef.mu1 * d[1];
    if (coef.mu2 != 0.0) mu += coef.mu2 * d[2];
    const double sigma = coef.sigma0 + coef.sigma1 * scale_covariate(c);
    return {mu, sigma, coef.k0};
  }
};

namespace detail {

struct Standardization {
  double m1 = 0, s1 = 1, m2 = 0, s2 = 1, ms = 0, ss = 1;
};

inline Standardization standardization(const NsGevModel& shape, std::span<const Covariates> covs) {
  std::vector<double> a, b, s;
  for (const auto& c : covs) {
    const auto d = shape.location_design(c);
    a.push_back(d[1]);
    b.push_back(std::isfinite(d[2]) ? d[2] : 0.0);
    s.push_back(shape.scale_covariate(c));
  }
  auto sd_or_one = [](const std::vector<double>& v) {
    const double sd = std::sqrt(stats::variance(v));
    return (std::isfinite(sd) && sd > 1e-12) ? sd : 1.0;
  };
  return {stats::mean(a), sd_or_one(a), stats::mean(b), sd_or_one(b), stats::mean(s), sd_or_one(s)};
}

// Coefficients on standardized covariates -> raw coefficients.
inline std::array<double, 6> to_raw(const std::array<double, 6>& eta, const Standardization& z) {
  std::array<double, 6> th{};
  th[1] = eta[1] / z.s1;
  th[2] = eta[2] / z.s2;
  th[0] = eta[0] - th[1] * z.m1 - th[2] * z.m2;
  th[4] = eta[4] / z.ss;
  th[3] = eta[3] - th[4] * z.ms;
  th[5] = eta[5];
  return th;
}

inline std::array<double, 6> to_standardized(const std::array<double, 6>& th, const Standardization& z) {
  std::array<double, 6> eta{};
  eta[1] = th[1] * z.s1;
  eta[2] = th[2] * z.s2;
  eta[0] = th[0] + th[1] * z.m1 + th[2] * z.m2;
  eta[4] = th[4] * z.ss;
  eta[3] = th[3] + th[4] * z.ms;
  eta[5] = th[5];
  return eta;
}

}  // namespace detail

struct RegressionFitOptions : FitOptions {
  std::optional<Coefficients> initial;
};

/// Negative log-likelihood of a covariate model at the given coefficients.
inline double ns_neg_log_likelihood(const NsGevModel& model, std::span<const double> data,
                                    std::span<const Covariates> covs) {
  double nll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const GevParams p = model.realize(covs[i]);
    if (!(p.sigma > 0.0)) return kInf;
    const double lp = gev_log_pdf(data[i], p);
    if (!std::isfinite(lp)) return kInf;
    nll -= lp;
  }
  return nll;
}

/// Maximum likelihood fit of the covariate model. `data` are negated pressure
/// minima. With `stationary` the calendar-year coefficient is held at zero.
inline NsGevModel fit_gev_regression(std::span<const double> data, std::span<const Covariates> covs,
                                     ModelKind kind, bool stationary,
                                     const RegressionFitOptions& opt = {}) {
  if (data.size() != covs.size()) throw std::invalid_argument("data/covariate size mismatch");
  detail::check_data(data, opt.min_size);
  NsGevModel model;
  model.kind = kind;
  model.stationary = stationary;
  model.n = data.size();
  for (const auto& c : covs)
    if (!model.admits(c))
      throw DataError(std::string("covariates outside the ") + to_string(kind) +
                      " model domain (T=" + std::to_string(c.lifetime) +
                      ", t_yr=" + std::to_string(c.t_yr) + ")");

  const auto zs = detail::standardization(model, covs);
  const std::size_t fixed = time_coefficient(kind);
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < 6; ++i)
    if (!(stationary && i == fixed)) free_idx.push_back(i);

  auto eval_raw = [&](const std::array<double, 6>& th) {
    NsGevModel m = model;
    m.coef = Coefficients::from_array(th);
    return ns_neg_log_likelihood(m, data, covs);
  };
  auto expand = [&](const std::vector<double>& v) {
    std::array<double, 6> a{};
    for (std::size_t j = 0; j < free_idx.size(); ++j) a[free_idx[j]] = v[j];
    return a;
  };
  auto objective_std = [&](const std::vector<double>& v) { return eval_raw(detail::to_raw(expand(v), zs)); };

  const GevParams init = pwm_estimate({data.begin(), data.end()});
  std::array<double, 6> eta0{init.mu, 0.0, 0.0, init.sigma, 0.0, std::clamp(init.k, -0.45, 0.45)};
  if (opt.initial) {
    auto th = opt.initial->as_array();
    if (stationary) th[fixed] = 0.0;
    eta0 = detail::to_standardized(th, zs);
  }
  std::vector<double> x0, step;
  const std::array<double, 6> steps{0.2 * init.sigma, 0.2 * init.sigma, 0.2 * init.sigma,
                                    0.2 * init.sigma, 0.1 * init.sigma, 0.05};
  for (auto i : free_idx) {
    x0.push_back(eta0[i]);
    step.push_back(steps[i]);
  }
  if (!std::isfinite(objective_std(x0))) {
    // Widen the scale until every datum is inside the support.
    for (int tries = 0; tries < 60 && !std::isfinite(objective_std(x0)); ++tries) {
      for (std::size_t j = 0; j < free_idx.size(); ++j) {
        if (free_idx[j] == 3) x0[j] *= 1.25;
        if (free_idx[j] == 5) x0[j] *= 0.8;
      }
    }
  }
  const auto m = optimize::nelder_mead(objective_std, x0, step, opt.optimizer);
  if (!std::isfinite(m.value)) throw FitError(std::string(to_string(kind)) + " GEV regression has no feasible point");

  const auto theta = detail::to_raw(expand(m.x), zs);
  model.coef = Coefficients::from_array(theta);
  model.loglik = -m.value;
  model.convergence = m.convergence;

  for (const auto& c : covs)
    if (!(model.realize(c).sigma > 0.0))
      throw FitError("realized scale is not positive at T=" + std::to_string(c.lifetime) +
                     ", phi=" + std::to_string(c.phi_pmin) + ", t_yr=" + std::to_string(c.t_yr));

  std::vector<double> free_theta;
  for (auto i : free_idx) free_theta.push_back(theta[i]);
  auto objective_raw = [&](const std::vector<double>& v) {
    std::array<double, 6> a{};
    for (std::size_t j = 0; j < free_idx.size(); ++j) a[free_idx[j]] = v[j];
    return eval_raw(a);
  };
  Eigen::MatrixXd cov;
  optimize::covariance_from_hessian(optimize::numerical_hessian(objective_raw, free_theta, opt.hessian_step), cov);
  model.covariance.assign(36, 0.0);
  std::array<double, 6> se{};
  for (std::size_t a = 0; a < free_idx.size(); ++a) {
    se[free_idx[a]] = std::sqrt(cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)));
    for (std::size_t b = 0; b < free_idx.size(); ++b)
      model.covariance[free_idx[a] * 6 + free_idx[b]] =
          cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  model.se = Coefficients::from_array(se);
  if (!model.convergence.converged)
    throw FitError(std::string(to_string(kind)) + " GEV regression did not converge (best loglik " +
                   std::to_string(model.loglik) + ")");
  return model;
}

inline NsGevModel fit_nonstationary_gev(std::span<const double> data, std::span<const Covariates> covs,
                                        ModelKind kind, const RegressionFitOptions& opt = {}) {
  return fit_gev_regression(data, covs, kind, false, opt);
}

struct LrtResult {
  double statistic = 0.0;
  int dof = 1;
  double threshold = 0.0;
  bool significant = false;
};

/// Likelihood-ratio test of nested models at level alpha.
inline LrtResult likelihood_ratio_test(double null_loglik, double alt_loglik, int dof, double alpha = 0.05) {
  if (dof < 1) throw std::invalid_argument("likelihood_ratio_test: dof must be >= 1");
  const double slack = 1e-6 * std::max(1.0, std::abs(alt_loglik));
  double l = 2.0 * (alt_loglik - null_loglik);
  if (l < -2.0 * slack)
    throw FitError("likelihood ratio negative (" + std::to_string(l) + "): models are not nested");
  l = std::max(l, 0.0);
  LrtResult r;
  r.statistic = l;
  r.dof = dof;
  r.threshold = boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), 1.0 - alpha);
  r.significant = l > r.threshold;
  return r;
}

/// Probability-integral transform of a negated pressure minimum to the
/// standard Gumbel scale under the realized model.
inline double standardize(double neg_pmin, const Covariates& c, const NsGevModel& model) {
  const GevParams p = model.realize(c);
  if (!(p.sigma > 0.0)) throw DataError("standardize: realized scale not positive");
  const double z = (neg_pmin - p.mu) / p.sigma;
  if (std::abs(p.k) < kGumbelThreshold) return z;
  if (1.0 + p.k * z <= 0.0) throw DataError("standardize: value outside the model support");
  return std::log1p(p.k * z) / p.k;
}

inline double inverse_standardize(double z, const Covariates& c, const NsGevModel& model) {
  const GevParams p = model.realize(c);
  if (std::abs(p.k) < kGumbelThreshold) return p.mu + p.sigma * z;
  return p.mu + p.sigma * std::expm1(p.k * z) / p.k;
}

inline double gumbel_cdf(double z) { return std::exp(-std::exp(-z)); }
inline double gumbel_quantile(double u) { return -std::log(-std::log(u)); }

}  // namespace hurisk::evt
