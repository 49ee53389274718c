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

#include <gtest/gtest.h>

#include <filesystem>

#include "hurisk/pipeline.hpp"
#include "support/pipeline_run.hpp"

using namespace hurisk;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hurisk_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(StageSeed, DistinctAndStable) {
  const auto a = pipeline::stage_seed(1, "simulate");
  EXPECT_EQ(a, pipeline::stage_seed(1, "simulate"));
  EXPECT_NE(a, pipeline::stage_seed(1, "validate"));
  EXPECT_NE(a, pipeline::stage_seed(2, "simulate"));
}

TEST(Pipeline, IngestCountsAndSkips) {
  const auto dir = scratch("ingest");
  synth::SyntheticOptions opt;
  opt.first_year = 1990;
  opt.last_year = 2021;
  opt.min_lifetime = 10;
  opt.seed = 3;
  synth::SyntheticTruth truth;
  io::write_file((dir / "h.txt").string(), synth::synthetic_hurdat2(opt, &truth));
  auto cfg = synth::small_pipeline_config((dir / "h.txt").string(), (dir / "out").string(), 1);
  cfg.data.first_year = 1990;
  const auto in = pipeline::ingest(cfg);
  long long kept = 0;
  for (const auto& e : in.events) {
    EXPECT_GE(e.lifetime, 25);
    EXPECT_LE(e.year, 2019);
    ++kept;
  }
  EXPECT_EQ(in.counts.total(), kept);
  EXPECT_EQ(in.counts.counts.size(), 30u);
  EXPECT_GT(in.skipped.below_min_lifetime, 0u);
  EXPECT_GT(in.events_after_last_year, 0u);
  EXPECT_EQ(in.input_sha256, io::sha256_file((dir / "h.txt").string()));
}

TEST(Pipeline, MissingSourceIsReported) {
  auto cfg = synth::small_pipeline_config("/nonexistent/hurdat2.txt", "/tmp/unused", 1);
  EXPECT_THROW(pipeline::ingest(cfg), DataError);
  cfg.data.source.clear();
  EXPECT_THROW(pipeline::ingest(cfg), ConfigError);
}

TEST(Pipeline, FittedModelsRoundTripThroughFiles) {
  const auto dir = scratch("models");
  auto cfg = synth::small_pipeline_config(synth::write_synthetic_hurdat2((dir / "h.txt").string()),
                                          (dir / "out").string(), 1);
  const auto in = pipeline::ingest(cfg);
  const auto fits = pipeline::fit_gev(in.events, cfg);
  pipeline::write_gev(fits, cfg.out_dir);
  for (auto kind : {evt::ModelKind::landfalling, evt::ModelKind::nonlandfalling}) {
    const auto& f = fits.of(kind);
    EXPECT_TRUE(f.stationary.stationary);
    EXPECT_EQ(f.stationary.coef.as_array()[evt::time_coefficient(kind)], 0.0);
    EXPECT_GE(f.nonstationary.loglik, f.stationary.loglik);
    const auto back = pipeline::load_gev(cfg.out_dir, kind, false);
    EXPECT_EQ(back.coef.as_array(), f.nonstationary.coef.as_array());
    EXPECT_EQ(back.covariance, f.nonstationary.covariance);
  }
  const auto rate = pipeline::fit_rate(in.counts, cfg);
  pipeline::write_rate(rate, cfg.out_dir);
  EXPECT_EQ(pipeline::load_rate(cfg.out_dir).b, rate.model.b);
  EXPECT_THROW(pipeline::load_rate((dir / "nowhere").string()), DataError);
}

TEST(Pipeline, SerialAndParallelRunsAreByteIdentical) {
  const auto dir = scratch("repro");
  const auto data = synth::write_synthetic_hurdat2((dir / "h.txt").string());
  const auto a = synth::run_pipeline(synth::small_pipeline_config(data, (dir / "serial").string(), 1));
  const auto b = synth::run_pipeline(synth::small_pipeline_config(data, (dir / "parallel").string(), 4));
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  for (const char* f : {"events.csv", "gev_coefficients.csv", "pools.csv", "return_levels.csv",
                        "return_levels_baseline.csv", "validation_summary.csv", "mann_kendall_landfalling.csv"})
    EXPECT_TRUE(a.count(f)) << f;
}

TEST(Pipeline, SeedChangesSimulationOutput) {
  const auto dir = scratch("seed");
  const auto data = synth::write_synthetic_hurdat2((dir / "h.txt").string());
  auto cfg = synth::small_pipeline_config(data, (dir / "a").string(), 1);
  const auto in = pipeline::ingest(cfg);
  const auto fits = pipeline::fit_gev(in.events, cfg);
  const auto rate = pipeline::fit_rate(in.counts, cfg);
  const auto sim_in = pipeline::simulation_inputs(in.events, fits, rate.model, cfg);
  const auto s1 = pipeline::run_simulation(sim_in, cfg, 1, 5, 10);
  const auto s2 = pipeline::run_simulation(sim_in, cfg, 2, 5, 10);
  bool differ = false;
  for (std::size_t r = 0; r < s1.pools.size(); ++r) differ |= s1.pools[r].windspeed != s2.pools[r].windspeed;
  EXPECT_TRUE(differ);
}

TEST(Pipeline, CoastGridMustHaveStandardRegions) {
  const auto dir = scratch("coast");
  io::write_file((dir / "c.csv").string(), "lon,lat,region\n-90,29,Florida\n-89,29,Florida\n");
  EXPECT_THROW(pipeline::load_coast((dir / "c.csv").string()), ConfigError);
}
