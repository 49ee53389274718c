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

// Pipeline stages shared by the command-line tool and the acceptance
// checks. Each stage is a pure function of its inputs plus a writer that
// serializes its result under an output directory.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "hurisk/coast.hpp"
#include "hurisk/config.hpp"
#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/hurdat2.hpp"
#include "hurisk/io.hpp"
#include "hurisk/occurrence.hpp"
#include "hurisk/random.hpp"
#include "hurisk/risk.hpp"
#include "hurisk/simulate.hpp"
#include "hurisk/trend.hpp"
#include "hurisk/windfield.hpp"

namespace hurisk::pipeline {

namespace fs = std::filesystem;
using io::Csv;
using io::json;

/// Seed for a named stage, derived from the run seed.
inline std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : stage) h = (h ^ c) * 0x100000001b3ULL;
  return substream(seed, {h})();
}

inline std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// ---------------------------------------------------------------------------
// Ingest.

struct Ingested {
  std::vector<hurdat2::StormRecord> records;
  std::vector<hurdat2::HurricaneEvent> events;  // within [first_year, last_year]
  hurdat2::SkipReport skipped;
  hurdat2::YearlyCounts counts;
  std::size_t events_after_last_year = 0;  // newer data present in the file
  std::string input_sha256;
};

inline Ingested ingest(const PipelineConfig& cfg) {
  if (cfg.data.source.empty()) throw ConfigError("data.source is required");
  Ingested in;
  const auto text = io::read_file(cfg.data.source);
  in.input_sha256 = io::sha256_hex(text);
  in.records = hurdat2::parse(std::string_view(text));
  auto all = hurdat2::to_events(in.records, cfg.min_lifetime, &in.skipped);
  for (const auto& e : all)
    if (e.year > cfg.data.last_year) ++in.events_after_last_year;
  in.events = hurdat2::filter_years(all, cfg.data.first_year, cfg.data.last_year);
  in.counts = hurdat2::yearly_counts(in.events, cfg.min_lifetime, cfg.data.first_year, cfg.data.last_year);
  return in;
}

inline std::vector<std::string> write_ingest(const Ingested& in, const std::string& dir) {
  Csv events({"storm_id", "name", "year", "lifetime", "p_min", "t_pmin", "phi_pmin", "is_landfalling", "t_lf"});
  for (const auto& e : in.events)
    events.add(e.storm_id, e.name, e.year, e.lifetime, e.p_min, e.t_pmin, e.phi_pmin, e.is_landfalling,
               e.t_lf ? std::to_string(*e.t_lf) : std::string());
  Csv counts({"year", "events"});
  for (std::size_t i = 0; i < in.counts.counts.size(); ++i)
    counts.add(in.counts.first_year + static_cast<int>(i), in.counts.counts[i]);
  std::size_t landfalling = 0;
  for (const auto& e : in.events) landfalling += e.is_landfalling;
  const json report{{"storms", in.records.size()},
                    {"events", in.events.size()},
                    {"landfalling", landfalling},
                    {"nonlandfalling", in.events.size() - landfalling},
                    {"skipped_short", in.skipped.below_min_lifetime},
                    {"skipped_no_pressure", in.skipped.no_pressure},
                    {"pressures_out_of_range", in.skipped.pressure_out_of_range},
                    {"events_after_last_year", in.events_after_last_year},
                    {"input_sha256", in.input_sha256}};
  const std::vector<std::string> files{path_in(dir, "events.csv"), path_in(dir, "yearly_counts.csv"),
                                       path_in(dir, "ingest_report.json")};
  io::write_file(files[0], events.str());
  io::write_file(files[1], counts.str());
  io::write_json(files[2], report);
  return files;
}

// ---------------------------------------------------------------------------
// Pressure-minimum models.

struct KindFit {
  evt::NsGevModel stationary;
  evt::NsGevModel nonstationary;
  evt::LrtResult lrt;
  std::size_t excluded = 0;
};

struct GevFits {
  KindFit landfalling;
  KindFit nonlandfalling;
  [[nodiscard]] const KindFit& of(evt::ModelKind k) const {
    return k == evt::ModelKind::landfalling ? landfalling : nonlandfalling;
  }
};

/// Stationary fit first, then the time-dependent model started from it, so
/// the nested likelihood ratio compares like with like.
inline KindFit fit_kind(const std::vector<hurdat2::HurricaneEvent>& events, evt::ModelKind kind, double alpha,
                        int base_year = kBaseYear) {
  const auto s = gev_sample(events, kind, base_year);
  KindFit f;
  f.excluded = s.excluded;
  f.stationary = evt::fit_gev_regression(s.data, s.covariates, kind, true);
  evt::RegressionFitOptions opt;
  opt.initial = f.stationary.coef;
  f.nonstationary = evt::fit_nonstationary_gev(s.data, s.covariates, kind, opt);
  if (f.nonstationary.loglik < f.stationary.loglik) {
    // Fall back to the default start if the seeded search stalled below the null.
    auto alt = evt::fit_nonstationary_gev(s.data, s.covariates, kind);
    if (alt.loglik > f.nonstationary.loglik) f.nonstationary = alt;
  }
  f.lrt = evt::likelihood_ratio_test(f.stationary.loglik, f.nonstationary.loglik, 1, alpha);
  return f;
}

inline GevFits fit_gev(const std::vector<hurdat2::HurricaneEvent>& events, const PipelineConfig& cfg) {
  return {fit_kind(events, evt::ModelKind::landfalling, cfg.lrt_alpha),
          fit_kind(events, evt::ModelKind::nonlandfalling, cfg.lrt_alpha)};
}

inline std::string model_file(const std::string& dir, evt::ModelKind kind, bool stationary) {
  return path_in(dir, std::string("models/gev_") + (stationary ? "stationary_" : "") + evt::to_string(kind) + ".json");
}

inline std::vector<std::string> write_gev(const GevFits& fits, const std::string& dir) {
  std::vector<std::string> files;
  Csv table({"kind", "coefficient", "estimate", "se"});
  Csv lrt({"kind", "loglik_stationary", "loglik_nonstationary", "L", "dof", "threshold", "significant", "excluded"});
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling}) {
    const auto& f = fits.of(kind);
    for (bool st : {true, false}) {
      files.push_back(model_file(dir, kind, st));
      io::write_json(files.back(), io::to_json(st ? f.stationary : f.nonstationary));
    }
    const auto c = f.nonstationary.coef.as_array();
    const auto s = f.nonstationary.se.as_array();
    for (std::size_t i = 0; i < 6; ++i) table.add(evt::to_string(kind), evt::Coefficients::names[i], c[i], s[i]);
    lrt.add(evt::to_string(kind), f.stationary.loglik, f.nonstationary.loglik, f.lrt.statistic, f.lrt.dof,
            f.lrt.threshold, f.lrt.significant, f.excluded);
  }
  files.push_back(path_in(dir, "gev_coefficients.csv"));
  io::write_file(files.back(), table.str());
  files.push_back(path_in(dir, "gev_lrt.csv"));
  io::write_file(files.back(), lrt.str());
  return files;
}

inline evt::NsGevModel load_gev(const std::string& dir, evt::ModelKind kind, bool stationary) {
  const auto p = model_file(dir, kind, stationary);
  if (!fs::exists(p)) throw DataError("missing model file '" + p + "' (run fit-gev first)");
  return io::gev_model_from_json(io::read_json(p));
}

// ---------------------------------------------------------------------------
// Trend analysis.

struct SeriesTest {
  std::string parameter;  // location or scale
  std::string label;
  std::size_t n = 0;
  trend::MkResult mk;
  double tau_b_recent = std::nan("");  // windows ending in or after 1960
};

struct KindTrend {
  std::vector<trend::WindowFit> windows;
  trend::RealizedSeries series;
  std::vector<SeriesTest> tests;
  double f_test_p = std::nan("");
  double t_test_p = std::nan("");
  std::size_t n_recent = 0, n_earlier = 0;

  [[nodiscard]] std::size_t count(const std::string& parameter, trend::Trend t) const {
    return static_cast<std::size_t>(std::count_if(tests.begin(), tests.end(), [&](const SeriesTest& s) {
      return s.parameter == parameter && s.mk.trend == t;
    }));
  }
  [[nodiscard]] std::size_t total(const std::string& parameter) const {
    return static_cast<std::size_t>(
        std::count_if(tests.begin(), tests.end(), [&](const SeriesTest& s) { return s.parameter == parameter; }));
  }
};

struct TrendReport {
  KindTrend landfalling;
  KindTrend nonlandfalling;
  [[nodiscard]] const KindTrend& of(evt::ModelKind k) const {
    return k == evt::ModelKind::landfalling ? landfalling : nonlandfalling;
  }
};

inline KindTrend trend_kind(const std::vector<hurdat2::HurricaneEvent>& events, evt::ModelKind kind,
                            const PipelineConfig& cfg) {
  KindTrend out;
  auto wopt = cfg.trend.window;
  if (!wopt.first_year) wopt.first_year = cfg.data.first_year;
  if (!wopt.last_year) wopt.last_year = cfg.data.last_year;
  out.windows = trend::sliding_window_fit(events, kind, wopt);
  std::vector<evt::Covariates> sample;
  for (const auto& e : events)
    if (matches(e, kind)) sample.push_back(covariates_of(e));
  out.series = trend::realize_param_series(out.windows, kind, sample);

  auto test = [&](const trend::ParamSeries& s, const char* parameter) {
    SeriesTest t{parameter, s.label, s.values.size(), {}, std::nan("")};
    try {
      t.mk = trend::mann_kendall_test(s.values, cfg.trend.alpha);
    } catch (const std::exception&) {
      t.mk.p_value = std::nan("");
    }
    std::vector<double> recent;
    for (std::size_t i = 0; i < s.values.size(); ++i)
      if (s.window_end_years[i] >= 1960) recent.push_back(s.values[i]);
    try {
      if (recent.size() >= 2) t.tau_b_recent = trend::kendall_tau_b(recent);
    } catch (const std::exception&) {
    }
    out.tests.push_back(std::move(t));
  };
  for (const auto& s : out.series.location) test(s, "location");
  for (const auto& s : out.series.scale) test(s, "scale");

  const auto split = trend::split_recent(events, kind, cfg.trend.recent_years, cfg.data.last_year);
  out.n_recent = split.recent.size();
  out.n_earlier = split.earlier.size();
  if (split.recent.size() >= 2 && split.earlier.size() >= 2) {
    out.f_test_p = trend::f_test_equal_variance(split.recent, split.earlier);
    out.t_test_p = trend::t_test_equal_means(split.recent, split.earlier);
  }
  return out;
}

inline TrendReport trend_analysis(const std::vector<hurdat2::HurricaneEvent>& events, const PipelineConfig& cfg) {
  return {trend_kind(events, evt::ModelKind::landfalling, cfg), trend_kind(events, evt::ModelKind::nonlandfalling, cfg)};
}

inline std::vector<std::string> write_trend(const TrendReport& rep, const std::string& dir) {
  std::vector<std::string> files;
  json summary;
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling}) {
    const auto& k = rep.of(kind);
    const std::string name = evt::to_string(kind);
    Csv w({"start_year", "end_year", "n_events", "reliable", "fitted", "mu0", "mu1", "mu2", "sigma0", "sigma1", "k0",
           "loglik"});
    for (const auto& f : k.windows)
      w.add(f.start_year, f.end_year, f.n_events, f.reliable, f.fitted, f.coef.mu0, f.coef.mu1, f.coef.mu2,
            f.coef.sigma0, f.coef.sigma1, f.coef.k0, f.loglik);
    files.push_back(path_in(dir, "trend_windows_" + name + ".csv"));
    io::write_file(files.back(), w.str());

    Csv s({"parameter", "series", "lifetime", "phi_pmin", "end_year", "value"});
    auto emit = [&](const std::vector<trend::ParamSeries>& v, const char* parameter) {
      for (const auto& p : v)
        for (std::size_t i = 0; i < p.values.size(); ++i)
          s.add(parameter, p.label, p.covariates.lifetime, p.covariates.phi_pmin, p.window_end_years[i], p.values[i]);
    };
    emit(k.series.location, "location");
    emit(k.series.scale, "scale");
    files.push_back(path_in(dir, "trend_series_" + name + ".csv"));
    io::write_file(files.back(), s.str());

    Csv m({"parameter", "series", "n", "S", "z", "tau_b", "tau_b_since_1960", "p_value", "exact", "trend"});
    for (const auto& t : k.tests)
      m.add(t.parameter, t.label, t.n, t.mk.s, t.mk.z, t.mk.tau_b, t.tau_b_recent, t.mk.p_value, t.mk.exact, trend::to_string(t.mk.trend));
    files.push_back(path_in(dir, "mann_kendall_" + name + ".csv"));
    io::write_file(files.back(), m.str());

    json ks;
    for (const char* param : {"location", "scale"})
      ks[param] = {{"series", k.total(param)},
                   {"increasing", k.count(param, trend::Trend::increasing)},
                   {"decreasing", k.count(param, trend::Trend::decreasing)},
                   {"none", k.count(param, trend::Trend::none)}};
    ks["f_test_p"] = k.f_test_p;
    ks["t_test_p"] = k.t_test_p;
    ks["n_recent"] = k.n_recent;
    ks["n_earlier"] = k.n_earlier;
    summary[name] = ks;
  }
  files.push_back(path_in(dir, "trend_summary.json"));
  io::write_json(files.back(), summary);
  return files;
}

// ---------------------------------------------------------------------------
// Occurrence.

struct RateReport {
  occurrence::RateSeries series;
  occurrence::RateModel model;
  double benchmark_window_mean = std::nan("");  // windowed estimates ending in the benchmark span
  double benchmark_model_mean = std::nan("");   // exponential model averaged over the span
};

inline RateReport fit_rate(const hurdat2::YearlyCounts& counts, const PipelineConfig& cfg) {
  RateReport r;
  r.series = occurrence::sliding_rate(counts, cfg.rate.window_years);
  r.model = occurrence::fit_exponential_rate(counts);
  r.benchmark_window_mean = occurrence::mean_rate(r.series, cfg.rate.benchmark_from, cfg.rate.benchmark_to);
  double s = 0.0;
  for (int y = cfg.rate.benchmark_from; y <= cfg.rate.benchmark_to; ++y) s += r.model.rate_for_year(y);
  r.benchmark_model_mean = s / (cfg.rate.benchmark_to - cfg.rate.benchmark_from + 1);
  return r;
}

inline std::string rate_file(const std::string& dir) { return path_in(dir, "models/rate.json"); }

inline std::vector<std::string> write_rate(const RateReport& r, const std::string& dir) {
  Csv s({"window_end_year", "lambda_hat", "se", "model_rate"});
  for (std::size_t i = 0; i < r.series.window_end_years.size(); ++i)
    s.add(r.series.window_end_years[i], r.series.lambda_hat[i], r.series.se[i],
          r.model.rate_for_year(r.series.window_end_years[i]));
  std::vector<std::string> files{path_in(dir, "rate_series.csv"), rate_file(dir), path_in(dir, "rate_report.json")};
  io::write_file(files[0], s.str());
  io::write_json(files[1], io::to_json(r.model));
  io::write_json(files[2], {{"benchmark_window_mean", r.benchmark_window_mean},
                            {"benchmark_model_mean", r.benchmark_model_mean}});
  return files;
}

inline occurrence::RateModel load_rate(const std::string& dir) {
  const auto p = rate_file(dir);
  if (!fs::exists(p)) throw DataError("missing rate model '" + p + "' (run fit-rate first)");
  return io::rate_model_from_json(io::read_json(p));
}

// ---------------------------------------------------------------------------
// Validation.

inline std::vector<risk::ValidationReport> validation(const std::vector<hurdat2::HurricaneEvent>& events,
                                                      const PipelineConfig& cfg, std::uint64_t seed) {
  std::vector<risk::ValidationReport> out;
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling})
    for (int n : cfg.validation.horizons) {
      risk::ValidationOptions opt;
      opt.replicates = cfg.validation.replicates;
      opt.min_training_events = cfg.validation.min_training_events;
      opt.seed = seed;
      out.push_back(risk::validate_split(events, n, kind, opt, cfg.data.last_year));
    }
  return out;
}

inline std::vector<std::string> write_validation(const std::vector<risk::ValidationReport>& reps,
                                                 const std::string& dir) {
  std::vector<std::string> files;
  Csv summary({"kind", "horizon", "train_last_year", "n_train", "n_test", "coverage"});
  for (const auto& r : reps) {
    Csv c({"plotting_position", "return_period", "model_quantile", "band_low", "band_high", "observed"});
    for (std::size_t i = 0; i < r.observed.size(); ++i)
      c.add(r.plotting_position[i], 1.0 / (1.0 - r.plotting_position[i]), r.model_quantile[i], r.band_low[i],
            r.band_high[i], r.observed[i]);
    files.push_back(path_in(dir, "validation_" + std::string(evt::to_string(r.kind)) + "_" +
                                     std::to_string(r.horizon) + ".csv"));
    io::write_file(files.back(), c.str());
    summary.add(evt::to_string(r.kind), r.horizon, r.split_year, r.n_train, r.n_test, r.coverage);
  }
  files.push_back(path_in(dir, "validation_summary.csv"));
  io::write_file(files.back(), summary.str());
  return files;
}

// ---------------------------------------------------------------------------
// Simulation.

inline coast::CoastGrid load_coast(const std::string& path) {
  auto grid = coast::CoastGrid::from_file(path);
  const auto& std_names = coast::standard_regions();
  const std::set<std::string> want(std_names.begin(), std_names.end());
  const std::set<std::string> have(grid.regions().begin(), grid.regions().end());
  if (have != want) throw ConfigError("coast grid '" + path + "' must define exactly the 13 standard regions");
  return grid;
}

struct SimulationInputs {
  simulate::SimulationModels models;
  simulate::HistoricalData history;
  coast::CoastGrid grid;
};

inline SimulationInputs simulation_inputs(const std::vector<hurdat2::HurricaneEvent>& events, const GevFits& fits,
                                          const occurrence::RateModel& rate, const PipelineConfig& cfg) {
  cfg.validate_for_simulation();
  SimulationInputs in;
  in.models.landfalling = fits.landfalling.nonstationary;
  in.models.nonlandfalling = fits.nonlandfalling.nonstationary;
  in.models.rate = rate;
  in.models.ratio = simulate::RatioDensity::from_events(events, cfg.ratio_bins);
  in.models.landfall_min_prob = simulate::estimate_landfall_min_prob(events);
  in.models.rmax = windfield::RmaxQuantileTable::from_file(cfg.rmax_table);
  in.history = simulate::HistoricalData::from_events(events);
  in.grid = load_coast(cfg.coast_grid);
  return in;
}

inline simulate::SimulationResult run_simulation(const SimulationInputs& in, const PipelineConfig& cfg,
                                                 std::uint64_t seed, int years, int trials,
                                                 const simulate::SimulationModels* models = nullptr) {
  auto sc = cfg.simulation;
  sc.seed = seed;
  sc.years = years;
  sc.trials = trials;
  return simulate::simulate_years(sc, models ? *models : in.models, in.history, in.grid, cfg.windfield);
}

inline std::vector<std::string> write_simulation(const simulate::SimulationResult& sim, const SimulationInputs& in,
                                                 const std::string& dir) {
  std::vector<std::string> files;
  Csv pools({"region", "year", "windspeed_ms"});
  for (std::size_t r = 0; r < sim.regions.size(); ++r)
    for (std::size_t i = 0; i < sim.pools[r].windspeed.size(); ++i)
      pools.add(sim.regions[r], sim.start_year + sim.pools[r].year[i], sim.pools[r].windspeed[i]);
  files.push_back(path_in(dir, "pools.csv"));
  io::write_file(files.back(), pools.str());

  Csv speed({"lat_center", "mean_speed_ms", "steps"});
  for (std::size_t i = 0; i < sim.speed.sum.size(); ++i)
    speed.add(sim.speed.center(i), sim.speed.mean(i), sim.speed.count[i]);
  files.push_back(path_in(dir, "speed_profile.csv"));
  io::write_file(files.back(), speed.str());

  Csv regions({"region", "events", "on_coast_steps"});
  for (std::size_t r = 0; r < sim.regions.size(); ++r)
    regions.add(sim.regions[r], sim.region_events[r], sim.pools[r].windspeed.size());
  files.push_back(path_in(dir, "region_events.csv"));
  io::write_file(files.back(), regions.str());

  Csv yearly({"year", "events"});
  for (std::size_t y = 0; y < sim.yearly_events.size(); ++y)
    yearly.add(sim.start_year + static_cast<int>(y), sim.yearly_events[y]);
  files.push_back(path_in(dir, "simulated_yearly_events.csv"));
  io::write_file(files.back(), yearly.str());

  files.push_back(path_in(dir, "models/simulation_inputs.json"));
  io::write_json(files.back(), {{"landfall_min_prob", in.models.landfall_min_prob},
                                {"ratio_density", io::to_json(in.models.ratio)},
                                {"range_landfalling", io::to_json(in.models.range_landfalling)},
                                {"range_nonlandfalling", io::to_json(in.models.range_nonlandfalling)}});
  files.push_back(path_in(dir, "simulation_summary.json"));
  io::write_json(files.back(), {{"start_year", sim.start_year},
                                {"years", sim.years},
                                {"trials", sim.trials},
                                {"events", sim.events},
                                {"skipped_events", sim.skipped}});
  return files;
}

// ---------------------------------------------------------------------------
// Return levels.

struct ReturnLevelReport {
  std::vector<risk::ReturnLevelEstimate> estimates;
  std::vector<risk::ReturnLevelEstimate> baseline;
  double baseline_rate = std::nan("");
  std::size_t skipped_draws = 0;
};

/// Constant occurrence rate for the baseline: the mean windowed estimate over
/// the benchmark span.
inline double baseline_rate(const hurdat2::YearlyCounts& counts, const PipelineConfig& cfg) {
  const auto series = occurrence::sliding_rate(counts, cfg.rate.window_years);
  const double v = occurrence::mean_rate(series, cfg.rate.benchmark_from, cfg.rate.benchmark_to);
  if (!std::isfinite(v)) throw DataError("no windowed rate estimates inside the benchmark span");
  return v;
}

inline ReturnLevelReport return_levels(const SimulationInputs& in, const GevFits& fits,
                                       const hurdat2::YearlyCounts& counts, const PipelineConfig& cfg,
                                       std::uint64_t seed, bool with_ci = true) {
  const auto& horizons = cfg.return_levels.horizons;
  const int years = *std::max_element(horizons.begin(), horizons.end());
  ReturnLevelReport rep;
  const auto central = run_simulation(in, cfg, stage_seed(seed, "central"), years, cfg.simulation.trials);
  rep.estimates = risk::return_levels(central, horizons);
  if (with_ci) {
    risk::CiOptions opt{cfg.return_levels.ci_draws, cfg.return_levels.ci_trials, stage_seed(seed, "ci")};
    rep.estimates = risk::return_level_ci(rep.estimates, horizons, cfg.simulation, in.models, in.history, in.grid,
                                          cfg.windfield, opt, &rep.skipped_draws);
  }
  if (cfg.return_levels.baseline) {
    rep.baseline_rate = baseline_rate(counts, cfg);
    const auto base = risk::stationary_baseline(in.models, fits.landfalling.stationary,
                                                fits.nonlandfalling.stationary, rep.baseline_rate);
    const auto sim = run_simulation(in, cfg, stage_seed(seed, "baseline"), years, cfg.simulation.trials, &base);
    rep.baseline = risk::return_levels(sim, horizons);
  }
  return rep;
}

inline std::vector<std::string> write_return_levels(const ReturnLevelReport& rep, const std::string& dir) {
  auto table = [](const std::vector<risk::ReturnLevelEstimate>& v) {
    Csv c({"region", "horizon", "r_n", "ci_low", "ci_high", "pool_size", "quantile_level", "sigma_q", "raw_low",
           "raw_high", "draws"});
    for (const auto& e : v)
      c.add(e.region, e.horizon, e.r_n, e.ci_low, e.ci_high, e.pool_size, e.quantile_level, e.sigma_q, e.raw_low,
            e.raw_high, e.draws);
    return c.str();
  };
  std::vector<std::string> files{path_in(dir, "return_levels.csv")};
  io::write_file(files[0], table(rep.estimates));
  if (!rep.baseline.empty()) {
    files.push_back(path_in(dir, "return_levels_baseline.csv"));
    io::write_file(files.back(), table(rep.baseline));
  }
  json summary{{"baseline_rate", rep.baseline_rate}, {"skipped_ci_draws", rep.skipped_draws}};
  json rows = json::array();
  for (std::size_t i = 0; i < rep.estimates.size(); ++i) {
    const auto& e = rep.estimates[i];
    json row{{"region", e.region}, {"horizon", e.horizon}, {"r_n", e.r_n}, {"ci", {e.ci_low, e.ci_high}}};
    if (i < rep.baseline.size()) row["baseline"] = rep.baseline[i].r_n;
    rows.push_back(row);
  }
  summary["estimates"] = rows;
  files.push_back(path_in(dir, "return_levels_summary.json"));
  io::write_json(files.back(), summary);
  return files;
}

}  // namespace hurisk::pipeline
