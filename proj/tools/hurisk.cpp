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

// hurisk: command-line front end for the hurricane risk pipeline.
//
// Every command reads the JSON config, writes its artifacts under the output
// directory and leaves a manifest_<command>.json next to them listing the
// config, input hashes and artifact hashes.

#include <CLI11.hpp>
#include <curl/curl.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hurisk/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hurisk;
using io::json;

namespace {

struct GlobalOptions {
  std::string config = "config/default.json";
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string log_level = "info";
  std::optional<unsigned> workers;
  std::optional<int> min_lifetime;
};

struct SimulateOptions {
  std::optional<int> years, trials, start_year;
};

struct ReturnLevelOptions {
  std::optional<int> trials;
  bool no_ci = false;
};

struct FetchOptions {
  std::string url;
  std::string output;
};

// Raw config with command-line overrides folded in, so the manifest records
// what actually ran.
struct Context {
  json raw;
  PipelineConfig cfg;
  std::string out;
};

Context make_context(const GlobalOptions& g, const SimulateOptions* sim = nullptr) {
  Context c;
  c.raw = [&] {
    const auto text = [&] {
      try {
        return io::read_file(g.config);
      } catch (const DataError&) {
        throw ConfigError("cannot open config '" + g.config + "'");
      }
    }();
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("config '" + g.config + "' is not valid JSON: " + e.what());
    }
  }();
  if (g.seed) c.raw["seed"] = *g.seed;
  if (g.workers) c.raw["workers"] = *g.workers;
  if (g.min_lifetime) c.raw["min_lifetime"] = *g.min_lifetime;
  if (sim) {
    if (sim->years) c.raw["simulation"]["years"] = *sim->years;
    if (sim->trials) c.raw["simulation"]["trials"] = *sim->trials;
    if (sim->start_year) c.raw["simulation"]["start_year"] = *sim->start_year;
  }
  if (!g.out_dir.empty()) c.raw["out_dir"] = fs::absolute(g.out_dir).lexically_normal().string();
  c.cfg = config_from_json(c.raw, fs::path(g.config).parent_path());
  c.cfg.validate();
  c.out = c.cfg.out_dir;
  return c;
}

class Run {
 public:
  Run(const Context& ctx, std::string command) : ctx_(ctx), command_(std::move(command)), manifest_(command_, ctx.raw) {}

  void artifacts(const std::vector<std::string>& files) {
    for (const auto& f : files) manifest_.artifact(f);
  }
  void input(const std::string& f) { manifest_.input(f); }
  void note(const std::string& k, json v) { manifest_.note(k, std::move(v)); }

  // Runs one stage; on failure the stage name goes to the log and the
  // manifest before the error propagates.
  template <class F>
  auto stage(const std::string& name, F&& fn) {
    io::Stopwatch sw;
    spdlog::info("stage {} started", name);
    try {
      if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
        fn();
        done(name, sw.seconds());
      } else {
        auto r = fn();
        done(name, sw.seconds());
        return r;
      }
    } catch (const std::exception& e) {
      spdlog::error("stage {} failed: {}", name, e.what());
      note("failed_stage", name);
      finish();
      throw;
    }
  }

  void finish() {
    const auto path = pipeline::path_in(ctx_.out, "manifest_" + command_ + ".json");
    manifest_.write(path);
    spdlog::info("manifest written to {}", path);
  }

 private:
  void done(const std::string& name, double s) {
    manifest_.timing(name, s);
    spdlog::info("stage {} finished in {:.2f} s", name, s);
  }

  const Context& ctx_;
  std::string command_;
  io::Manifest manifest_;
};

pipeline::Ingested do_ingest(Run& run, const Context& ctx) {
  auto in = run.stage("ingest", [&] { return pipeline::ingest(ctx.cfg); });
  run.input(ctx.cfg.data.source);
  spdlog::info("ingest storms={} events={} skipped_short={} pressures_out_of_range={}", in.records.size(),
               in.events.size(), in.skipped.below_min_lifetime, in.skipped.pressure_out_of_range);
  for (const auto& id : in.skipped.no_pressure) spdlog::info("skip storm={} reason=no_pressure", id);
  if (in.events_after_last_year)
    spdlog::warn("dataset is newer than the configured span: {} events after {} ignored", in.events_after_last_year,
                 ctx.cfg.data.last_year);
  if (!ctx.cfg.data.sha256.empty() && ctx.cfg.data.sha256 != in.input_sha256)
    spdlog::warn("input hash {} differs from the pinned {}", in.input_sha256, ctx.cfg.data.sha256);
  return in;
}

pipeline::GevFits load_fits(const std::string& dir) {
  pipeline::GevFits f;
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling}) {
    auto& k = kind == evt::ModelKind::landfalling ? f.landfalling : f.nonlandfalling;
    k.stationary = pipeline::load_gev(dir, kind, true);
    k.nonstationary = pipeline::load_gev(dir, kind, false);
  }
  return f;
}

void log_fits(const pipeline::GevFits& fits) {
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling}) {
    const auto& f = fits.of(kind);
    const auto c = f.nonstationary.coef.as_array();
    spdlog::info("gev {} mu0={:.2f} mu1={:.2f} mu2={:.2f} sigma0={:.2f} sigma1={:.3f} k={:.3f} L={:.2f}",
                 evt::to_string(kind), c[0], c[1], c[2], c[3], c[4], c[5], f.lrt.statistic);
  }
}

// ---------------------------------------------------------------------------
// fetch

std::size_t collect(char* data, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

void cmd_fetch(const GlobalOptions& g, const FetchOptions& f) {
  auto ctx = make_context(g);
  const std::string url = f.url.empty() ? ctx.cfg.data.url : f.url;
  const std::string dest = f.output.empty() ? ctx.cfg.data.source : f.output;
  if (url.empty()) throw ConfigError("data.url is required for fetch");
  if (dest.empty()) throw ConfigError("data.source is required for fetch");
  Run run(ctx, "fetch");
  run.stage("fetch", [&] {
    std::string body;
    CURL* h = curl_easy_init();
    if (!h) throw DataError("fetch error: cannot initialise libcurl");
    char err[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(h, CURLOPT_URL, url.c_str());
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h, CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, collect);
    curl_easy_setopt(h, CURLOPT_WRITEDATA, &body);
    curl_easy_setopt(h, CURLOPT_ERRORBUFFER, err);
    const CURLcode rc = curl_easy_perform(h);
    curl_easy_cleanup(h);
    if (rc != CURLE_OK)
      throw DataError("fetch error: " + url + ": " + (err[0] ? std::string(err) : curl_easy_strerror(rc)));
    const auto hash = io::sha256_hex(body);
    if (!ctx.cfg.data.sha256.empty() && hash != ctx.cfg.data.sha256) {
      const auto q = dest + ".quarantine";
      io::write_file(q, body);
      throw DataError("integrity error: " + url + " has sha256 " + hash + ", expected " + ctx.cfg.data.sha256 +
                      "; saved to " + q);
    }
    io::write_file(dest, body);
    spdlog::info("fetched {} bytes to {} sha256={}", body.size(), dest, hash);
    run.note("url", url);
    run.artifacts({dest});
  });
  run.finish();
}

// ---------------------------------------------------------------------------
// analysis commands

void cmd_ingest(const GlobalOptions& g) {
  auto ctx = make_context(g);
  Run run(ctx, "ingest");
  const auto in = do_ingest(run, ctx);
  run.artifacts(pipeline::write_ingest(in, ctx.out));
  run.finish();
}

void cmd_fit_gev(const GlobalOptions& g) {
  auto ctx = make_context(g);
  Run run(ctx, "fit-gev");
  const auto in = do_ingest(run, ctx);
  const auto fits = run.stage("fit-gev", [&] { return pipeline::fit_gev(in.events, ctx.cfg); });
  log_fits(fits);
  run.artifacts(pipeline::write_gev(fits, ctx.out));
  run.finish();
}

void cmd_fit_rate(const GlobalOptions& g) {
  auto ctx = make_context(g);
  Run run(ctx, "fit-rate");
  const auto in = do_ingest(run, ctx);
  const auto rate = run.stage("fit-rate", [&] { return pipeline::fit_rate(in.counts, ctx.cfg); });
  spdlog::info("rate a={:.4f} b={:.5f} benchmark_mean={:.3f}", rate.model.a, rate.model.b, rate.benchmark_window_mean);
  run.artifacts(pipeline::write_rate(rate, ctx.out));
  run.finish();
}

void cmd_trend(const GlobalOptions& g) {
  auto ctx = make_context(g);
  Run run(ctx, "trend");
  const auto in = do_ingest(run, ctx);
  const auto rep = run.stage("trend", [&] { return pipeline::trend_analysis(in.events, ctx.cfg); });
  run.artifacts(pipeline::write_trend(rep, ctx.out));
  run.finish();
}

void cmd_validate(const GlobalOptions& g) {
  auto ctx = make_context(g);
  const auto seed = ctx.cfg.require_seed();
  Run run(ctx, "validate");
  const auto in = do_ingest(run, ctx);
  const auto reps =
      run.stage("validate", [&] { return pipeline::validation(in.events, ctx.cfg, pipeline::stage_seed(seed, "validate")); });
  for (const auto& r : reps)
    spdlog::info("validation {} n={} coverage={:.3f}", evt::to_string(r.kind), r.horizon, r.coverage);
  run.artifacts(pipeline::write_validation(reps, ctx.out));
  run.finish();
}

void cmd_simulate(const GlobalOptions& g, const SimulateOptions& s) {
  auto ctx = make_context(g, &s);
  const auto seed = ctx.cfg.require_seed();
  ctx.cfg.validate_for_simulation();
  Run run(ctx, "simulate");
  const auto in = do_ingest(run, ctx);
  const auto fits = load_fits(ctx.out);
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling})
    run.input(pipeline::model_file(ctx.out, kind, false));
  run.input(pipeline::rate_file(ctx.out));
  run.input(ctx.cfg.coast_grid);
  run.input(ctx.cfg.rmax_table);
  const auto inputs = pipeline::simulation_inputs(in.events, fits, pipeline::load_rate(ctx.out), ctx.cfg);
  const auto sim = run.stage("simulate", [&] {
    return pipeline::run_simulation(inputs, ctx.cfg, pipeline::stage_seed(seed, "simulate"), ctx.cfg.simulation.years,
                                    ctx.cfg.simulation.trials);
  });
  spdlog::info("simulated {} events, {} skipped", sim.events, sim.skipped);
  run.artifacts(pipeline::write_simulation(sim, inputs, ctx.out));
  run.finish();
}

void cmd_return_levels(const GlobalOptions& g, const ReturnLevelOptions& r) {
  SimulateOptions s;
  s.trials = r.trials;
  auto ctx = make_context(g, &s);
  const auto seed = ctx.cfg.require_seed();
  ctx.cfg.validate_for_simulation();
  Run run(ctx, "return-levels");
  const auto in = do_ingest(run, ctx);
  const auto fits = load_fits(ctx.out);
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling})
    for (bool st : {true, false}) run.input(pipeline::model_file(ctx.out, kind, st));
  run.input(pipeline::rate_file(ctx.out));
  run.input(ctx.cfg.coast_grid);
  run.input(ctx.cfg.rmax_table);
  const auto inputs = pipeline::simulation_inputs(in.events, fits, pipeline::load_rate(ctx.out), ctx.cfg);
  const auto rep = run.stage("return-levels", [&] {
    return pipeline::return_levels(inputs, fits, in.counts, ctx.cfg, pipeline::stage_seed(seed, "return-levels"),
                                   !r.no_ci);
  });
  run.artifacts(pipeline::write_return_levels(rep, ctx.out));
  run.finish();
}

void cmd_pipeline(const GlobalOptions& g, const ReturnLevelOptions& r) {
  SimulateOptions s;
  s.trials = r.trials;
  auto ctx = make_context(g, &s);
  const auto seed = ctx.cfg.require_seed();
  ctx.cfg.validate_for_simulation();
  Run run(ctx, "pipeline");
  const auto in = do_ingest(run, ctx);
  run.artifacts(pipeline::write_ingest(in, ctx.out));

  const auto fits = run.stage("fit-gev", [&] { return pipeline::fit_gev(in.events, ctx.cfg); });
  log_fits(fits);
  run.artifacts(pipeline::write_gev(fits, ctx.out));

  const auto trend = run.stage("trend", [&] { return pipeline::trend_analysis(in.events, ctx.cfg); });
  run.artifacts(pipeline::write_trend(trend, ctx.out));

  const auto rate = run.stage("fit-rate", [&] { return pipeline::fit_rate(in.counts, ctx.cfg); });
  run.artifacts(pipeline::write_rate(rate, ctx.out));

  const auto reps =
      run.stage("validate", [&] { return pipeline::validation(in.events, ctx.cfg, pipeline::stage_seed(seed, "validate")); });
  run.artifacts(pipeline::write_validation(reps, ctx.out));

  const auto inputs = run.stage("simulation-inputs", [&] {
    return pipeline::simulation_inputs(in.events, fits, rate.model, ctx.cfg);
  });
  run.input(ctx.cfg.coast_grid);
  run.input(ctx.cfg.rmax_table);
  const auto sim = run.stage("simulate", [&] {
    return pipeline::run_simulation(inputs, ctx.cfg, pipeline::stage_seed(seed, "simulate"), ctx.cfg.simulation.years,
                                    ctx.cfg.simulation.trials);
  });
  run.artifacts(pipeline::write_simulation(sim, inputs, ctx.out));

  const auto rl = run.stage("return-levels", [&] {
    return pipeline::return_levels(inputs, fits, in.counts, ctx.cfg, pipeline::stage_seed(seed, "return-levels"),
                                   !r.no_ci);
  });
  run.artifacts(pipeline::write_return_levels(rl, ctx.out));
  run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hurricane risk pipeline: HURDAT2 ingest, extreme-value fits, storm simulation, return levels"};
  app.set_version_flag("--version", std::string(io::kToolVersion));
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON configuration file")->capture_default_str();
  app.add_option("--seed", g.seed, "run seed (overrides the config)");
  app.add_option("--out-dir", g.out_dir, "output directory (overrides the config)");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--min-lifetime", g.min_lifetime, "minimum number of 6-hourly points per event");

  FetchOptions fo;
  auto* fetch = app.add_subcommand("fetch", "download the HURDAT2 file");
  fetch->add_option("--url", fo.url, "source URL (default: data.url)");
  fetch->add_option("--output", fo.output, "destination (default: data.source)");

  auto* ingest = app.add_subcommand("ingest", "parse HURDAT2 and tabulate events");
  auto* fit_gev = app.add_subcommand("fit-gev", "fit the pressure-minimum GEV models");
  auto* fit_rate = app.add_subcommand("fit-rate", "fit the yearly occurrence rate");
  auto* trend = app.add_subcommand("trend", "sliding-window trend analysis");
  auto* validate = app.add_subcommand("validate", "train/test validation of the GEV models");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "simulate hurricane seasons from fitted models");
  simulate->add_option("--years", so.years, "years per trial");
  simulate->add_option("--trials", so.trials, "number of trials");
  simulate->add_option("--start-year", so.start_year, "first simulated year");

  ReturnLevelOptions ro;
  auto* rl = app.add_subcommand("return-levels", "return levels with confidence intervals");
  rl->add_option("--trials", ro.trials, "trials per simulation");
  rl->add_flag("--no-ci", ro.no_ci, "skip the confidence-interval runs");

  auto* pipe = app.add_subcommand("pipeline", "run every stage in order");
  pipe->add_option("--trials", ro.trials, "trials per simulation");
  pipe->add_flag("--no-ci", ro.no_ci, "skip the confidence-interval runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(Error::Category::config);
  }

  auto logger = spdlog::stderr_color_mt("hurisk");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%Y-%m-%dT%H:%M:%S.%e] [%l] %v");
  const auto level = spdlog::level::from_str(g.log_level);
  if (level == spdlog::level::off && g.log_level != "off") {
    spdlog::error("unknown log level '{}'", g.log_level);
    return static_cast<int>(Error::Category::config);
  }
  spdlog::set_level(level);

  const std::vector<std::pair<CLI::App*, std::function<void()>>> commands{
      {fetch, [&] { cmd_fetch(g, fo); }},
      {ingest, [&] { cmd_ingest(g); }},
      {fit_gev, [&] { cmd_fit_gev(g); }},
      {fit_rate, [&] { cmd_fit_rate(g); }},
      {trend, [&] { cmd_trend(g); }},
      {validate, [&] { cmd_validate(g); }},
      {simulate, [&] { cmd_simulate(g, so); }},
      {rl, [&] { cmd_return_levels(g, ro); }},
      {pipe, [&] { cmd_pipeline(g, ro); }},
  };
  curl_global_init(CURL_GLOBAL_DEFAULT);
  int rc = 0;
  try {
    for (const auto& [sub, fn] : commands)
      if (sub->parsed()) fn();
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    rc = e.exit_code();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    rc = 1;
  }
  curl_global_cleanup();
  return rc;
}
