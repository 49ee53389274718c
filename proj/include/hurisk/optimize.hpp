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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hurisk::optimize {

using Objective = std::function<double(const std::vector<double>&)>;

struct NelderMeadOptions {
  double tolerance = 1e-8;  // relative simplex diameter
  double f_tolerance = 1e-10;
  int max_evaluations = 40000;
  int restarts = 5;
  std::uint64_t seed = 0x5eed;
};

struct Convergence {
  bool converged = false;
  int evaluations = 0;
  int restarts_used = 0;
  double diameter = 0.0;
  std::string message;
};

struct Minimum {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  Convergence convergence;
};

namespace detail {

inline double relative_diameter(const std::vector<std::vector<double>>& simplex) {
  double d = 0.0;
  const auto& best = simplex.front();
  for (std::size_t v = 1; v < simplex.size(); ++v)
    for (std::size_t i = 0; i < best.size(); ++i)
      d = std::max(d, std::abs(simplex[v][i] - best[i]) / std::max(1.0, std::abs(best[i])));
  return d;
}

// One Nelder-Mead run (standard coefficients 1, 2, 0.5, 0.5).
inline Minimum nelder_mead_once(const Objective& f, std::vector<double> x0,
                                const std::vector<double>& step, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  std::vector<double> fv(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(s[i]);

  std::vector<std::size_t> order(n + 1);
  Minimum out;
  for (;;) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = std::move(s[order[i]]);
        f2[i] = fv[order[i]];
      }
      s = std::move(s2);
      fv = std::move(f2);
    }
    const double diam = relative_diameter(s);
    const double fspread = std::abs(fv[n] - fv[0]);
    if (std::isfinite(fv[0]) && diam < opt.tolerance &&
        fspread <= opt.f_tolerance * std::max(1.0, std::abs(fv[0]))) {
      out.convergence.converged = true;
      out.convergence.diameter = diam;
      break;
    }
    if (evals >= opt.max_evaluations) {
      out.convergence.diameter = diam;
      out.convergence.message = "evaluation budget exhausted";
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s[v][i] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (s[n][i] - centroid[i]);
      return x;
    };
    auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        s[n] = std::move(xe);
        fv[n] = fe;
      } else {
        s[n] = std::move(xr);
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      s[n] = std::move(xr);
      fv[n] = fr;
      continue;
    }
    const bool outside = fr < fv[n];
    auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[n])) {
      s[n] = std::move(xc);
      fv[n] = fc;
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t i = 0; i < n; ++i) s[v][i] = s[0][i] + 0.5 * (s[v][i] - s[0][i]);
      fv[v] = eval(s[v]);
    }
  }
  out.x = s[0];
  out.value = fv[0];
  out.convergence.evaluations = evals;
  return out;
}

}  // namespace detail

/// Derivative-free minimization. After the first run, restarts are launched
/// from the incumbent with a randomly perturbed initial simplex; the best
/// iterate over all runs is returned.
inline Minimum nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const std::vector<double>& step, const NelderMeadOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  std::bernoulli_distribution flip(0.5);

  Minimum best = detail::nelder_mead_once(f, x0, step, opt);
  int total = best.convergence.evaluations;
  int used = 0;
  for (int r = 0; r < opt.restarts; ++r) {
    std::vector<double> st(step.size());
    for (std::size_t i = 0; i < step.size(); ++i)
      st[i] = step[i] * jitter(rng) * (flip(rng) ? 1.0 : -1.0);
    Minimum m = detail::nelder_mead_once(f, best.x, st, opt);
    total += m.convergence.evaluations;
    ++used;
    const bool improved = m.value < best.value - 1e-12 * std::max(1.0, std::abs(best.value));
    if (m.value < best.value) best = std::move(m);
    // Stop early once a restart confirms the incumbent.
    if (!improved && best.convergence.converged && r >= 1) break;
  }
  best.convergence.evaluations = total;
  best.convergence.restarts_used = used;
  if (!std::isfinite(best.value)) best.convergence.converged = false;
  return best;
}

/// Central finite-difference Hessian with per-coordinate step
/// rel_step * max(|x_i|, 1).
inline Eigen::MatrixXd numerical_hessian(const Objective& f, const std::vector<double>& x,
                                         double rel_step = 1e-4) {
  const std::size_t n = x.size();
  Eigen::MatrixXd h(n, n);
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = rel_step * std::max(std::abs(x[i]), 1.0);
  const double f0 = f(x);
  auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    auto y = x;
    y[i] += di;
    y[j] += dj;
    return f(y);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = step[i];
    auto yp = x, ym = x;
    yp[i] += hi;
    ym[i] -= hi;
    h(i, i) = (f(yp) - 2.0 * f0 + f(ym)) / (hi * hi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hj = step[j];
      const double v = (shifted(i, hi, j, hj) - shifted(i, hi, j, -hj) - shifted(i, -hi, j, hj) +
                        shifted(i, -hi, j, -hj)) /
                       (4.0 * hi * hj);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

/// Inverse of the observed information. Returns false when the Hessian is
/// not positive definite (covariance left as NaN).
inline bool covariance_from_hessian(const Eigen::MatrixXd& hessian, Eigen::MatrixXd& cov) {
  const auto n = hessian.rows();
  cov = Eigen::MatrixXd::Constant(n, n, std::nan(""));
  if (!hessian.allFinite()) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(hessian);
  if (llt.info() != Eigen::Success) return false;
  cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return cov.allFinite();
}

}  // namespace hurisk::optimize
