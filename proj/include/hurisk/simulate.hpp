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

// Monte Carlo generator for yearly hurricane seasons: event counts, resampled
// tracks, donor pressure series shaped to a sampled minimum and range,
// landfall filling, maximum windspeeds and coastal region hits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "hurisk/coast.hpp"
#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/hurdat2.hpp"
#include "hurisk/occurrence.hpp"
#include "hurisk/parallel.hpp"
#include "hurisk/random.hpp"
#include "hurisk/windfield.hpp"

namespace hurisk::simulate {

using windfield::GeoPoint;

/// Pressure range (max - min of the series) ~ Normal(a + b p_min, c).
struct PressureRangeModel {
  double a = 0.0, b = 0.0, c = 1.0;
  double se_a = 0.0, se_b = 0.0, se_c = 0.0;

  void validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !(c > 0.0) || !std::isfinite(c))
      throw ConfigError("pressure range model needs finite a, b and c > 0");
  }
  [[nodiscard]] double mean(double p_min) const { return a + b * p_min; }
};

inline PressureRangeModel default_range_model(evt::ModelKind kind) {
  if (kind == evt::ModelKind::landfalling) return {872.33, -0.87, 11.77, 25.48, 0.03, 0.32};
  return {829.50, -0.82, 7.47, 19.77, 0.02, 0.19};
}

/// Histogram density of t_pmin / t_lf on [0, 1]. Bins may have zero width,
/// which gives point masses.
struct RatioDensity {
  std::vector<double> edges;  // size bins + 1, nondecreasing
  std::vector<double> mass;   // size bins, sums to 1

  void validate() const {
    if (mass.empty() || edges.size() != mass.size() + 1) throw ConfigError("ratio density: bad bin layout");
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (!(mass[i] >= 0.0)) throw ConfigError("ratio density: negative mass");
      if (edges[i + 1] < edges[i]) throw ConfigError("ratio density: edges must be nondecreasing");
      total += mass[i];
    }
    if (edges.front() < 0.0 || edges.back() > 1.0) throw ConfigError("ratio density must live on [0, 1]");
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("ratio density masses must sum to 1");
  }

  [[nodiscard]] double sample(Rng& rng) const {
    double u = uniform_open(rng), acc = 0.0;
    std::size_t bin = mass.size() - 1;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      acc += mass[i];
      if (u <= acc && mass[i] > 0.0) {
        bin = i;
        break;
      }
    }
    while (mass[bin] <= 0.0 && bin > 0) --bin;
    return edges[bin] + uniform_open(rng) * (edges[bin + 1] - edges[bin]);
  }

  static RatioDensity point(double r) {
    RatioDensity d{{r, r}, {1.0}};
    d.validate();
    return d;
  }

  /// From landfalling events whose minimum comes strictly before landfall.
  static RatioDensity from_events(const std::vector<hurdat2::HurricaneEvent>& events, int bins = 10) {
    if (bins < 1) throw ConfigError("ratio density needs at least one bin");
    RatioDensity d;
    for (int i = 0; i <= bins; ++i) d.edges.push_back(static_cast<double>(i) / bins);
    d.mass.assign(static_cast<std::size_t>(bins), 0.0);
    double n = 0.0;
    for (const auto& e : events) {
      if (!e.is_landfalling || !e.t_lf || *e.t_lf <= 0 || e.t_pmin >= *e.t_lf) continue;
      const double r = static_cast<double>(e.t_pmin) / *e.t_lf;
      const auto bin = std::min<std::size_t>(static_cast<std::size_t>(r * bins), static_cast<std::size_t>(bins - 1));
      d.mass[bin] += 1.0;
      n += 1.0;
    }
    if (n == 0.0) throw DataError("ratio density: no landfalling event reaches its minimum before landfall");
    for (auto& m : d.mass) m /= n;
    return d;
  }
};

/// Fraction of landfalling events whose pressure minimum is at landfall.
inline double estimate_landfall_min_prob(const std::vector<hurdat2::HurricaneEvent>& events) {
  double hits = 0.0, n = 0.0;
  for (const auto& e : events) {
    if (!e.is_landfalling || !e.t_lf) continue;
    n += 1.0;
    if (e.t_pmin == *e.t_lf) hits += 1.0;
  }
  if (n == 0.0) throw DataError("no landfalling events to estimate the landfall-minimum probability");
  return hits / n;
}

/// Exponential relaxation of the pressure toward ambient after landfall,
/// rates per 6-hour step.
struct LandfallFilling {
  double alpha_coastal = 0.08;
  double alpha_inland = 0.25;
  double ambient = 1013.0;

  void validate() const {
    if (!(alpha_coastal >= 0.0) || !(alpha_inland >= 0.0)) throw ConfigError("landfall filling rates must be >= 0");
  }
};

struct SimulationConfig {
  std::uint64_t seed = 0;
  int start_year = 2020;
  int years = 20;
  int trials = 1000;
  double track_noise_nmi = 100.0;
  std::optional<double> landfall_min_prob;  // estimated from data when absent
  double coastal_buffer_deg = 2.0;
  LandfallFilling filling;
  double range_floor = 1.0;  // hPa
  int base_year = kBaseYear;
  unsigned workers = 1;
  double speed_lat_min = 15.0;
  double speed_lat_max = 40.0;
  double speed_bucket_deg = 2.5;

  [[nodiscard]] double noise_deg() const { return track_noise_nmi / 60.0; }

  void validate() const {
    if (trials < 1) throw ConfigError("simulation.trials must be >= 1");
    if (years < 1) throw ConfigError("simulation.years must be >= 1");
    if (start_year < base_year) throw ConfigError("simulation.start_year precedes the base year");
    if (!(coastal_buffer_deg > 0.0)) throw ConfigError("simulation.coastal_buffer_deg must be positive");
    if (!(track_noise_nmi >= 0.0)) throw ConfigError("simulation.track_noise_nmi must be >= 0");
    if (landfall_min_prob && !(*landfall_min_prob >= 0.0 && *landfall_min_prob <= 1.0))
      throw ConfigError("simulation.landfall_min_prob must lie in [0, 1]");
    if (!(range_floor > 0.0)) throw ConfigError("simulation.range_floor must be positive");
    if (!(speed_bucket_deg > 0.0) || !(speed_lat_max > speed_lat_min))
      throw ConfigError("simulation speed buckets are empty");
    filling.validate();
  }
};

struct HistoricalTrack {
  std::vector<GeoPoint> points;
  bool is_landfalling = false;
  std::optional<int> t_lf;
};

struct HistoricalData {
  std::vector<HistoricalTrack> tracks;
  std::vector<std::vector<double>> donors;  // nonlandfalling pressure series

  static HistoricalData from_events(const std::vector<hurdat2::HurricaneEvent>& events) {
    HistoricalData h;
    for (const auto& e : events) {
      HistoricalTrack t{{}, e.is_landfalling, e.t_lf};
      for (const auto& p : e.track) t.points.push_back({p.lat_deg, p.lon_deg});
      if (t.points.size() >= 2) h.tracks.push_back(std::move(t));
      if (e.is_landfalling) continue;
      std::vector<double> series;
      for (const auto& p : e.track)
        if (p.central_pressure_hpa) series.push_back(*p.central_pressure_hpa);
      h.donors.push_back(std::move(series));
    }
    return h;
  }
};

/// Everything fitted that the generator consumes.
struct SimulationModels {
  evt::NsGevModel landfalling;
  evt::NsGevModel nonlandfalling;
  occurrence::RateModel rate;
  PressureRangeModel range_landfalling = default_range_model(evt::ModelKind::landfalling);
  PressureRangeModel range_nonlandfalling = default_range_model(evt::ModelKind::nonlandfalling);
  RatioDensity ratio;
  windfield::RmaxQuantileTable rmax;
  double landfall_min_prob = 0.5;
};

struct SampledTrack {
  std::size_t donor = 0;
  std::vector<GeoPoint> points;
};

/// Uniformly chosen historical track with independent Gaussian offsets on
/// each coordinate at every step.
inline SampledTrack sample_track(std::span<const HistoricalTrack> tracks, double noise_deg, Rng& rng) {
  if (tracks.empty()) throw SimulationError("no historical tracks to sample");
  std::uniform_int_distribution<std::size_t> pick(0, tracks.size() - 1);
  SampledTrack s{pick(rng), {}};
  s.points = tracks[s.donor].points;
  if (noise_deg > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_deg);
    for (auto& p : s.points) {
      p.lat += noise(rng);
      p.lon += noise(rng);
    }
  }
  return s;
}

/// Linear resampling to T points; endpoints are kept.
inline std::vector<double> resample_series(std::span<const double> donor, int T) {
  if (T < 1) throw std::invalid_argument("resample_series: T must be >= 1");
  if (donor.empty()) throw std::invalid_argument("resample_series: empty donor");
  std::vector<double> out(static_cast<std::size_t>(T));
  if (T == 1 || donor.size() == 1) {
    std::fill(out.begin(), out.end(), donor.front());
    return out;
  }
  const double scale = static_cast<double>(donor.size() - 1) / (T - 1);
  for (int i = 0; i < T; ++i) {
    const double x = i * scale;
    const auto j = std::min(static_cast<std::size_t>(x), donor.size() - 2);
    const double w = x - static_cast<double>(j);
    out[static_cast<std::size_t>(i)] = donor[j] + w * (donor[j + 1] - donor[j]);
  }
  out.back() = donor.back();
  return out;
}

/// Donor drawn uniformly, redrawn when it has fewer than two valid pressures
/// or no variation.
inline std::vector<double> sample_pressure_series(std::span<const std::vector<double>> donors, int T, Rng& rng,
                                                  int max_draws = 100) {
  if (donors.empty()) throw SimulationError("no donor pressure series");
  std::uniform_int_distribution<std::size_t> pick(0, donors.size() - 1);
  for (int i = 0; i < max_draws; ++i) {
    const auto& d = donors[pick(rng)];
    if (d.size() < 2) continue;
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    if (*hi - *lo <= 0.0) continue;
    return resample_series(d, T);
  }
  throw SimulationError("no usable donor pressure series after " + std::to_string(max_draws) + " draws");
}

/// With probability p the minimum sits at landfall; otherwise at
/// round(r * t_lf) with r from the ratio density.
inline int place_pressure_minimum(int t_lf, double p, const RatioDensity& ratio, Rng& rng) {
  if (t_lf < 0) throw std::invalid_argument("place_pressure_minimum: t_lf must be >= 0");
  if (uniform_open(rng) < p) return t_lf;
  const double r = ratio.sample(rng);
  return std::clamp(static_cast<int>(std::lround(r * t_lf)), 0, t_lf);
}

/// Affine map so the series spans [p_min, p_min + p_range], then a circular
/// shift that puts the minimum at t_pmin.
inline std::vector<double> shape_pressure_series(std::span<const double> series, int t_pmin, double p_min,
                                                 double p_range) {
  if (series.size() < 2) throw std::invalid_argument("shape_pressure_series: need >= 2 points");
  if (!(p_range > 0.0)) throw std::invalid_argument("shape_pressure_series: p_range must be positive");
  if (t_pmin < 0 || static_cast<std::size_t>(t_pmin) >= series.size())
    throw std::invalid_argument("shape_pressure_series: t_pmin out of range");
  const auto lo_it = std::min_element(series.begin(), series.end());
  const auto hi_it = std::max_element(series.begin(), series.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi - lo > 0.0)) throw SimulationError("constant donor pressure series");
  const double scale = p_range / (hi - lo);
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = p_min + (series[i] - lo) * scale;
  out[static_cast<std::size_t>(lo_it - series.begin())] = p_min;
  out[static_cast<std::size_t>(hi_it - series.begin())] = p_min + p_range;
  const auto n = static_cast<long>(out.size());
  const long shift = ((t_pmin - static_cast<long>(lo_it - series.begin())) % n + n) % n;
  std::rotate(out.begin(), out.begin() + (n - shift) % n, out.end());
  return out;
}

/// Normal(a + b p_min, c) truncated to values above `floor`.
inline double sample_pressure_range(double p_min, const PressureRangeModel& m, double floor, Rng& rng) {
  const double mean = m.mean(p_min);
  boost::math::normal_distribution<double> n01;
  const double tail = boost::math::cdf(boost::math::complement(n01, (floor - mean) / m.c));
  if (!(tail > 0.0)) return std::nextafter(floor, std::numeric_limits<double>::infinity());
  const double v = uniform_open(rng) * tail;
  const double x = mean + m.c * boost::math::quantile(boost::math::complement(n01, v));
  return std::max(x, std::nextafter(floor, std::numeric_limits<double>::infinity()));
}

/// p(t) = ambient - (ambient - p(t_lf)) exp(-alpha (t - t_lf)) for t > t_lf.
inline std::vector<double> apply_landfall_filling(std::vector<double> series, int t_lf, double alpha,
                                                  double ambient = 1013.0) {
  if (t_lf < 0 || static_cast<std::size_t>(t_lf) >= series.size())
    throw std::invalid_argument("apply_landfall_filling: t_lf outside the series");
  const double deficit = ambient - series[static_cast<std::size_t>(t_lf)];
  for (std::size_t t = static_cast<std::size_t>(t_lf) + 1; t < series.size(); ++t) {
    const double decay = std::isinf(alpha) ? 0.0 : std::exp(-alpha * static_cast<double>(t - static_cast<std::size_t>(t_lf)));
    series[t] = ambient - deficit * decay;
  }
  return series;
}

struct SimulatedHurricane {
  std::vector<GeoPoint> track;
  std::vector<double> pressure;
  std::vector<double> windspeed;
  std::vector<double> speed;  // translational, m/s
  bool is_landfalling = false;
  std::optional<int> t_lf;
  int t_pmin = 0;
  double p_min = 0.0;
  coast::CoastalHits hits;
};

/// One event of the given year following the full recipe.
inline SimulatedHurricane simulate_event(int t_yr, const SimulationConfig& cfg, const SimulationModels& models,
                                         const HistoricalData& hist, const coast::CoastGrid& grid,
                                         const windfield::WindfieldConfig& wind, Rng& rng) {
  SimulatedHurricane h;
  auto st = sample_track(hist.tracks, cfg.noise_deg(), rng);
  const auto& donor = hist.tracks[st.donor];
  h.track = std::move(st.points);
  const int T = static_cast<int>(h.track.size());
  h.is_landfalling = donor.is_landfalling;

  std::vector<std::optional<coast::Nearest>> near(h.track.size());
  for (std::size_t t = 0; t < h.track.size(); ++t) near[t] = grid.nearest_within(h.track[t], cfg.coastal_buffer_deg);

  if (h.is_landfalling) {
    for (int t = 0; t < T; ++t)
      if (near[static_cast<std::size_t>(t)]) {
        h.t_lf = t;
        break;
      }
    if (!h.t_lf) h.t_lf = std::clamp(donor.t_lf.value_or(0), 0, T - 1);
  }

  auto series = sample_pressure_series(hist.donors, T, rng);
  if (h.is_landfalling) {
    const double p = cfg.landfall_min_prob.value_or(models.landfall_min_prob);
    h.t_pmin = place_pressure_minimum(*h.t_lf, p, models.ratio, rng);
  } else {
    h.t_pmin = static_cast<int>(std::min_element(series.begin(), series.end()) - series.begin());
  }

  const auto& gev = h.is_landfalling ? models.landfalling : models.nonlandfalling;
  const evt::Covariates cov{T, h.track[static_cast<std::size_t>(h.t_pmin)].lat, t_yr};
  if (!gev.admits(cov)) throw SimulationError("covariates outside the pressure-minimum model domain");
  const auto params = gev.realize(cov);
  if (!params.valid()) throw SimulationError("realized pressure-minimum scale is not positive");
  h.p_min = -evt::sample_gev(params, rng);
  if (!std::isfinite(h.p_min)) throw SimulationError("non-finite pressure minimum");

  const auto& range_model = h.is_landfalling ? models.range_landfalling : models.range_nonlandfalling;
  const double range = sample_pressure_range(h.p_min, range_model, cfg.range_floor, rng);
  series = shape_pressure_series(series, h.t_pmin, h.p_min, range);

  if (h.is_landfalling) {
    const auto next = static_cast<std::size_t>(std::min(*h.t_lf + 1, T - 1));
    const auto n = near[next] ? *near[next] : grid.nearest(h.track[next]);
    const double alpha = n.side > 0.0 ? cfg.filling.alpha_inland : cfg.filling.alpha_coastal;
    series = apply_landfall_filling(std::move(series), *h.t_lf, alpha, cfg.filling.ambient);
  }
  h.pressure = std::move(series);

  h.speed = windfield::translational_velocities(h.track, wind);
  const double level = uniform_open(rng);
  h.windspeed.resize(h.track.size());
  h.hits.step_region.assign(h.track.size(), -1);
  h.hits.region_max.assign(grid.regions().size(), std::nan(""));
  for (std::size_t t = 0; t < h.track.size(); ++t) {
    const double key = near[t] ? near[t]->foot.lon : h.track[t].lon;
    const double r_max = models.rmax.at(key, level);
    h.windspeed[t] = windfield::max_windspeed(r_max, h.track[t].lat, h.pressure[t], h.speed[t], wind);
    if (!near[t]) continue;
    h.hits.step_region[t] = near[t]->region;
    auto& m = h.hits.region_max[static_cast<std::size_t>(near[t]->region)];
    if (std::isnan(m) || h.windspeed[t] > m) m = h.windspeed[t];
  }
  return h;
}

/// Average translational speed by latitude bucket.
struct SpeedProfile {
  double lat_min = 15.0;
  double bucket = 2.5;
  std::vector<double> sum;
  std::vector<long long> count;

  SpeedProfile() = default;
  SpeedProfile(double lo, double hi, double width)
      : lat_min(lo), bucket(width),
        sum(static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9)), 0.0),
        count(sum.size(), 0) {}

  void add(double lat, double speed) {
    if (lat < lat_min) return;
    const auto i = static_cast<std::size_t>((lat - lat_min) / bucket);
    if (i >= sum.size()) return;
    sum[i] += speed;
    ++count[i];
  }
  void merge(const SpeedProfile& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      count[i] += o.count[i];
    }
  }
  [[nodiscard]] double center(std::size_t i) const { return lat_min + (static_cast<double>(i) + 0.5) * bucket; }
  [[nodiscard]] double mean(std::size_t i) const {
    return count[i] ? sum[i] / static_cast<double>(count[i]) : std::nan("");
  }
};

/// On-coast 6-hourly windspeeds of one region with the simulated year index.
struct RegionPool {
  std::vector<int> year;  // 0-based index into the simulated years
  std::vector<double> windspeed;
};

struct SimulationResult {
  std::vector<std::string> regions;
  int start_year = 0;
  int years = 0;
  int trials = 0;
  std::vector<RegionPool> pools;
  std::vector<long long> region_events;  // events with at least one on-coast step in the region
  std::vector<long long> yearly_events;  // per simulated year, summed over trials
  SpeedProfile speed;
  long long events = 0;
  long long skipped = 0;
};

inline void validate_models(const SimulationModels& m) {
  m.range_landfalling.validate();
  m.range_nonlandfalling.validate();
  m.ratio.validate();
  m.rmax.validate();
  if (!(m.landfall_min_prob >= 0.0 && m.landfall_min_prob <= 1.0))
    throw ConfigError("landfall-minimum probability must lie in [0, 1]");
  if (!(m.rate.a >= 0.0) || !std::isfinite(m.rate.b)) throw ConfigError("rate model needs a >= 0 and finite b");
}

/// Runs `cfg.trials` independent sequences of `cfg.years` seasons. Each
/// (trial, year) owns its own random substream, so results do not depend on
/// the number of workers.
inline SimulationResult simulate_years(const SimulationConfig& cfg, const SimulationModels& models,
                                       const HistoricalData& hist, const coast::CoastGrid& grid,
                                       const windfield::WindfieldConfig& wind) {
  cfg.validate();
  wind.validate();
  validate_models(models);
  if (hist.tracks.empty()) throw SimulationError("no historical tracks");
  if (hist.donors.empty()) throw SimulationError("no nonlandfalling donor pressure series");

  const std::size_t R = grid.regions().size();
  std::vector<SimulationResult> per_trial(static_cast<std::size_t>(cfg.trials));
  parallel_for(per_trial.size(), cfg.workers, [&](std::size_t trial) {
    auto& out = per_trial[trial];
    out.pools.resize(R);
    out.region_events.assign(R, 0);
    out.yearly_events.assign(static_cast<std::size_t>(cfg.years), 0);
    out.speed = SpeedProfile(cfg.speed_lat_min, cfg.speed_lat_max, cfg.speed_bucket_deg);
    for (int y = 0; y < cfg.years; ++y) {
      auto rng = substream(cfg.seed, {trial, static_cast<std::uint64_t>(y)});
      const int t_yr = cfg.start_year + y - cfg.base_year;
      const int count = occurrence::sample_event_count(t_yr, models.rate, rng);
      out.yearly_events[static_cast<std::size_t>(y)] = count;
      for (int e = 0; e < count; ++e) {
        SimulatedHurricane h;
        try {
          h = simulate_event(t_yr, cfg, models, hist, grid, wind, rng);
        } catch (const std::exception&) {
          ++out.skipped;
          continue;
        }
        ++out.events;
        for (std::size_t t = 0; t < h.track.size(); ++t) {
          out.speed.add(h.track[t].lat, h.speed[t]);
          const int r = h.hits.step_region[t];
          if (r < 0) continue;
          out.pools[static_cast<std::size_t>(r)].year.push_back(y);
          out.pools[static_cast<std::size_t>(r)].windspeed.push_back(h.windspeed[t]);
        }
        for (std::size_t r = 0; r < R; ++r)
          if (h.hits.hit(static_cast<int>(r))) ++out.region_events[r];
      }
    }
  });

  SimulationResult res;
  res.regions = grid.regions();
  res.start_year = cfg.start_year;
  res.years = cfg.years;
  res.trials = cfg.trials;
  res.pools.resize(R);
  res.region_events.assign(R, 0);
  res.yearly_events.assign(static_cast<std::size_t>(cfg.years), 0);
  res.speed = SpeedProfile(cfg.speed_lat_min, cfg.speed_lat_max, cfg.speed_bucket_deg);
  for (const auto& t : per_trial) {
    for (std::size_t r = 0; r < R; ++r) {
      auto& dst = res.pools[r];
      dst.year.insert(dst.year.end(), t.pools[r].year.begin(), t.pools[r].year.end());
      dst.windspeed.insert(dst.windspeed.end(), t.pools[r].windspeed.begin(), t.pools[r].windspeed.end());
      res.region_events[r] += t.region_events[r];
    }
    for (std::size_t y = 0; y < res.yearly_events.size(); ++y) res.yearly_events[y] += t.yearly_events[y];
    res.speed.merge(t.speed);
    res.events += t.events;
    res.skipped += t.skipped;
  }
  return res;
}

}  // namespace hurisk::simulate
