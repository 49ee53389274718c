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

// Pipeline configuration read from JSON. Relative paths resolve against the
// directory of the configuration file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/simulate.hpp"
#include "hurisk/trend.hpp"
#include "hurisk/windfield.hpp"

namespace hurisk {

struct DataConfig {
  std::string source;  // local HURDAT2 file
  std::string url;
  std::string sha256;  // pinned content hash, optional
  int first_year = 1851;
  int last_year = 2019;
};

struct TrendConfig {
  trend::WindowOptions window;
  double alpha = 0.05;
  int recent_years = 40;
};

struct RateConfig {
  int window_years = 20;
  int benchmark_from = 1965;
  int benchmark_to = 1994;
};

struct ValidationConfig {
  std::vector<int> horizons{20, 30, 50};
  int replicates = 1000;
  std::size_t min_training_events = 30;
};

struct ReturnLevelConfig {
  std::vector<int> horizons{20, 30, 50};
  int ci_draws = 100;
  int ci_trials = 100;
  bool baseline = true;
};

struct PipelineConfig {
  DataConfig data;
  int min_lifetime = 25;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  double lrt_alpha = 0.05;
  TrendConfig trend;
  RateConfig rate;
  ValidationConfig validation;
  windfield::WindfieldConfig windfield;
  simulate::SimulationConfig simulation;
  ReturnLevelConfig return_levels;
  int ratio_bins = 10;
  std::string coast_grid;
  std::string rmax_table;
  std::string out_dir = "out";

  [[nodiscard]] std::uint64_t require_seed() const {
    if (!seed) throw ConfigError("seed is required for this command");
    return *seed;
  }

  void validate() const {
    if (min_lifetime < 1) throw ConfigError("min_lifetime must be >= 1");
    if (data.first_year > data.last_year) throw ConfigError("data.first_year is after data.last_year");
    if (rate.window_years < 2) throw ConfigError("rate.window_years must be >= 2");
    if (trend.window.window_years < 10) throw ConfigError("trend.window_years must be >= 10");
    if (!(lrt_alpha > 0.0 && lrt_alpha < 1.0) || !(trend.alpha > 0.0 && trend.alpha < 1.0))
      throw ConfigError("alpha levels must lie in (0, 1)");
    for (int h : return_levels.horizons)
      if (h < 2) throw ConfigError("return_levels.horizons must be >= 2");
    simulation.validate();
  }

  /// Additional checks for commands that evaluate windspeeds.
  void validate_for_simulation() const {
    validate();
    windfield.validate();
    if (coast_grid.empty()) throw ConfigError("coast_grid is required");
    if (rmax_table.empty()) throw ConfigError("rmax_table is required");
  }
};

namespace detail {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace detail

inline PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = ".") {
  using detail::read;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  PipelineConfig c;
  if (j.contains("data")) {
    const auto& d = j.at("data");
    read(d, "source", c.data.source);
    read(d, "url", c.data.url);
    read(d, "sha256", c.data.sha256);
    read(d, "first_year", c.data.first_year);
    read(d, "last_year", c.data.last_year);
  }
  read(j, "min_lifetime", c.min_lifetime);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    std::uint64_t s = 0;
    read(j, "seed", s);
    c.seed = s;
  }
  read(j, "workers", c.workers);
  read(j, "lrt_alpha", c.lrt_alpha);
  if (j.contains("trend")) {
    const auto& t = j.at("trend");
    read(t, "window_years", c.trend.window.window_years);
    read(t, "step_years", c.trend.window.step_years);
    read(t, "min_events", c.trend.window.min_events);
    read(t, "alpha", c.trend.alpha);
    read(t, "recent_years", c.trend.recent_years);
  }
  if (j.contains("rate")) {
    const auto& r = j.at("rate");
    read(r, "window_years", c.rate.window_years);
    read(r, "benchmark_from", c.rate.benchmark_from);
    read(r, "benchmark_to", c.rate.benchmark_to);
  }
  if (j.contains("validation")) {
    const auto& v = j.at("validation");
    read(v, "horizons", c.validation.horizons);
    read(v, "replicates", c.validation.replicates);
    read(v, "min_training_events", c.validation.min_training_events);
  }
  if (j.contains("windfield")) {
    const auto& w = j.at("windfield");
    if (w.contains("K") && !w.at("K").is_null()) {
      double k = 0.0;
      read(w, "K", k);
      c.windfield.K = k;
    }
    read(w, "omega", c.windfield.omega);
    read(w, "ambient_pressure", c.windfield.ambient_pressure);
    read(w, "deficit_factor", c.windfield.deficit_factor);
    read(w, "degree_to_meter", c.windfield.degree_to_meter);
    std::string metric = "flat";
    read(w, "metric", metric);
    if (metric == "flat") c.windfield.metric = windfield::DistanceMetric::flat;
    else if (metric == "great_circle") c.windfield.metric = windfield::DistanceMetric::great_circle;
    else throw ConfigError("windfield.metric must be 'flat' or 'great_circle'");
  }
  if (j.contains("simulation")) {
    const auto& s = j.at("simulation");
    auto& sc = c.simulation;
    read(s, "start_year", sc.start_year);
    read(s, "years", sc.years);
    read(s, "trials", sc.trials);
    read(s, "track_noise_nmi", sc.track_noise_nmi);
    if (s.contains("landfall_min_prob") && !s.at("landfall_min_prob").is_null()) {
      double p = 0.0;
      read(s, "landfall_min_prob", p);
      sc.landfall_min_prob = p;
    }
    read(s, "coastal_buffer_deg", sc.coastal_buffer_deg);
    read(s, "range_floor", sc.range_floor);
    read(s, "speed_lat_min", sc.speed_lat_min);
    read(s, "speed_lat_max", sc.speed_lat_max);
    read(s, "speed_bucket_deg", sc.speed_bucket_deg);
    if (s.contains("landfall_filling")) {
      const auto& f = s.at("landfall_filling");
      read(f, "alpha_coastal", sc.filling.alpha_coastal);
      read(f, "alpha_inland", sc.filling.alpha_inland);
    }
    read(s, "ratio_bins", c.ratio_bins);
  }
  if (j.contains("return_levels")) {
    const auto& r = j.at("return_levels");
    read(r, "horizons", c.return_levels.horizons);
    read(r, "ci_draws", c.return_levels.ci_draws);
    read(r, "ci_trials", c.return_levels.ci_trials);
    read(r, "baseline", c.return_levels.baseline);
  }
  read(j, "coast_grid", c.coast_grid);
  read(j, "rmax_table", c.rmax_table);
  read(j, "out_dir", c.out_dir);

  c.data.source = detail::resolve(base, c.data.source);
  c.coast_grid = detail::resolve(base, c.coast_grid);
  c.rmax_table = detail::resolve(base, c.rmax_table);
  c.out_dir = detail::resolve(base, c.out_dir);

  c.trend.window.workers = c.workers;
  c.simulation.workers = c.workers;
  c.simulation.filling.ambient = c.windfield.ambient_pressure;
  if (c.seed) c.simulation.seed = *c.seed;
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace hurisk
