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

// Scalar maximum-windspeed model driven by pressure deficit, radius to
// maximum winds, Coriolis parameter and translational speed:
//
//   V = 0.865 (K sqrt(dp) - R_max f / 2) + 0.5 u,   f = omega sin(phi),
//   dp = deficit_factor (ambient - p).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hurisk/error.hpp"
#include "hurisk/random.hpp"

namespace hurisk::windfield {

enum class DistanceMetric { flat, great_circle };

struct WindfieldConfig {
  std::optional<double> K;  // m s^-1 hPa^-1/2, no default
  double omega = 7.2982e-4;
  double ambient_pressure = 1013.0;
  double deficit_factor = 0.75;
  double degree_to_meter = 111120.0;
  double step_seconds = 21600.0;
  DistanceMetric metric = DistanceMetric::flat;

  void validate() const {
    if (!K) throw ConfigError("windfield.K is required (no default value)");
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw ConfigError(std::string("windfield.") + name + " must be positive");
    };
    positive(*K, "K");
    positive(omega, "omega");
    positive(ambient_pressure, "ambient_pressure");
    positive(deficit_factor, "deficit_factor");
    positive(degree_to_meter, "degree_to_meter");
    positive(step_seconds, "step_seconds");
  }
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline double coriolis(double phi_deg, const WindfieldConfig& cfg) {
  return cfg.omega * std::sin(phi_deg * std::numbers::pi / 180.0);
}

/// Pressure deficit in hPa; pressures above ambient clamp to zero.
inline double pressure_deficit(double p_hpa, const WindfieldConfig& cfg, bool* clamped = nullptr) {
  const double d = cfg.deficit_factor * (cfg.ambient_pressure - p_hpa);
  if (clamped) *clamped = d < 0.0;
  return std::max(d, 0.0);
}

/// Distance between two centers in meters under the configured metric.
inline double center_distance_m(const GeoPoint& a, const GeoPoint& b, const WindfieldConfig& cfg) {
  if (cfg.metric == DistanceMetric::flat)
    return std::hypot(b.lat - a.lat, b.lon - a.lon) * cfg.degree_to_meter;
  constexpr double rad = std::numbers::pi / 180.0;
  const double radius = cfg.degree_to_meter / rad;
  const double dlat = (b.lat - a.lat) * rad, dlon = (b.lon - a.lon) * rad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * radius * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Speed of the center between steps t-1 and t, m/s.
inline double translational_velocity(std::span<const GeoPoint> track, std::size_t t, const WindfieldConfig& cfg) {
  if (t == 0 || t >= track.size()) throw std::out_of_range("translational_velocity: t must be in [1, size)");
  return center_distance_m(track[t - 1], track[t], cfg) / cfg.step_seconds;
}

/// Speeds for every step; the first step reuses u_1.
inline std::vector<double> translational_velocities(std::span<const GeoPoint> track, const WindfieldConfig& cfg) {
  std::vector<double> u(track.size(), 0.0);
  for (std::size_t t = 1; t < track.size(); ++t) u[t] = translational_velocity(track, t, cfg);
  if (track.size() > 1) u[0] = u[1];
  return u;
}

inline double max_windspeed(double r_max_m, double phi_deg, double p_hpa, double u_ms,
                            const WindfieldConfig& cfg, bool* floored = nullptr) {
  const double f = coriolis(phi_deg, cfg);
  const double v = 0.865 * (*cfg.K * std::sqrt(pressure_deficit(p_hpa, cfg)) - r_max_m * f / 2.0) + 0.5 * u_ms;
  if (floored) *floored = v < 0.0;
  return std::max(v, 0.0);
}

/// Quantiles of the radius to maximum winds keyed by coastal longitude.
class RmaxQuantileTable {
 public:
  RmaxQuantileTable() = default;

  /// rows: (key longitude, quantile level, value in meters)
  void add(double key, double level, double value_m) {
    if (!(value_m > 0.0)) throw DataError("R_max table values must be positive");
    if (!(level >= 0.0 && level <= 1.0)) throw DataError("R_max quantile level must lie in [0, 1]");
    rows_[key][level] = value_m;
  }

  [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
  [[nodiscard]] std::size_t keys() const noexcept { return rows_.size(); }

  /// Checks monotonicity in the quantile level at every key.
  void validate() const {
    if (rows_.empty()) throw DataError("R_max table is empty");
    for (const auto& [key, row] : rows_) {
      double prev = 0.0;
      for (const auto& [level, v] : row) {
        if (v < prev) throw DataError("R_max table not monotone in quantile level at key " + std::to_string(key));
        prev = v;
      }
    }
  }

  /// Value at the nearest key, linearly interpolated in the quantile level.
  [[nodiscard]] double at(double key, double level, bool* extrapolated = nullptr) const {
    if (rows_.empty()) throw DataError("R_max table is empty");
    if (extrapolated) *extrapolated = key < rows_.begin()->first || key > rows_.rbegin()->first;
    auto it = rows_.lower_bound(key);
    if (it == rows_.end()) {
      it = std::prev(it);
    } else if (it != rows_.begin()) {
      auto prev = std::prev(it);
      if (key - prev->first <= it->first - key) it = prev;
    }
    const auto& row = it->second;
    if (level <= row.begin()->first) return row.begin()->second;
    if (level >= row.rbegin()->first) return row.rbegin()->second;
    auto hi = row.lower_bound(level);
    if (hi->first == level) return hi->second;
    auto lo = std::prev(hi);
    const double w = (level - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
  }

  static RmaxQuantileTable from_csv(std::istream& in) {
    RmaxQuantileTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string a, b, c;
      if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ','))
        throw DataError("R_max table line " + std::to_string(n) + ": expected 3 fields");
      try {
        t.add(std::stod(a), std::stod(b), std::stod(c));
      } catch (const std::invalid_argument&) {
        if (t.empty()) continue;  // header row
        throw DataError("R_max table line " + std::to_string(n) + ": non-numeric field");
      }
    }
    t.validate();
    return t;
  }

  static RmaxQuantileTable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open R_max table '" + path + "'");
    return from_csv(in);
  }

 private:
  std::map<double, std::map<double, double>> rows_;
};

inline double rmax_sample(double psi_deg, const RmaxQuantileTable& table, Rng& rng, bool* extrapolated = nullptr) {
  return table.at(psi_deg, uniform_open(rng), extrapolated);
}

}  // namespace hurisk::windfield
