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

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "hurisk/config.hpp"
#include "hurisk/io.hpp"

using namespace hurisk;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hurisk_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Num, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = U(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(std::strtod(io::num(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(io::num(0.1), "0.1");
  EXPECT_EQ(io::num(45.0), "45");
  EXPECT_EQ(io::num(std::nan("")), "nan");
  EXPECT_EQ(io::num(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Csv, QuotesAndTypes) {
  io::Csv c({"region", "year", "v", "flag"});
  c.add(std::string("Connecticut-Massachusetts-New Hampshire"), 2020, 33.5, true);
  c.add("a,b", 1, 0.25, false);
  c.add("say \"hi\"", -3, 1e-20, true);
  EXPECT_EQ(c.str(),
            "region,year,v,flag\n"
            "Connecticut-Massachusetts-New Hampshire,2020,33.5,1\n"
            "\"a,b\",1,0.25,0\n"
            "\"say \"\"hi\"\"\",-3,1e-20,1\n");
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Models, JsonRoundTrip) {
  evt::NsGevModel m{evt::ModelKind::nonlandfalling, false, {-1027.13, 27.40, -11.47, 20.48, -0.16, -0.13},
                    {9.1, 2.2, 1.3, 0.4, 0.05, 0.02}, std::vector<double>(36, 0.5), -4321.5, 900, {}};
  const auto back = io::gev_model_from_json(io::to_json(m));
  EXPECT_EQ(back.kind, m.kind);
  EXPECT_EQ(back.stationary, m.stationary);
  EXPECT_EQ(back.coef.as_array(), m.coef.as_array());
  EXPECT_EQ(back.se.as_array(), m.se.as_array());
  EXPECT_EQ(back.covariance, m.covariance);
  EXPECT_EQ(back.loglik, m.loglik);

  occurrence::RateModel r{1.024, 0.015, 0.1, 0.001};
  const auto rb = io::rate_model_from_json(io::to_json(r));
  EXPECT_EQ(rb.a, r.a);
  EXPECT_EQ(rb.b, r.b);
  EXPECT_EQ(rb.se_a, r.se_a);
  EXPECT_EQ(rb.se_b, r.se_b);

  const auto range = simulate::default_range_model(evt::ModelKind::landfalling);
  const auto gb = io::range_model_from_json(io::to_json(range));
  EXPECT_EQ(gb.a, range.a);
  EXPECT_EQ(gb.c, range.c);

  const simulate::RatioDensity d{{0.0, 0.5, 1.0}, {0.25, 0.75}};
  const auto db = io::ratio_from_json(io::to_json(d));
  EXPECT_EQ(db.edges, d.edges);
  EXPECT_EQ(db.mass, d.mass);
}

TEST(Models, MissingCoefficientIsDataError) {
  json j = io::coefficients_json({});
  j.erase("k0");
  EXPECT_THROW(io::coefficients_from_json(j), DataError);
}

TEST(Config, BundledDefaultLoads) {
  const auto c = load_config(std::string(HURISK_SOURCE_DIR) + "/config/default.json");
  EXPECT_EQ(c.min_lifetime, 25);
  ASSERT_TRUE(c.seed);
  ASSERT_TRUE(c.windfield.K);
  EXPECT_EQ(c.trend.window.window_years, 40);
  EXPECT_EQ(c.rate.window_years, 20);
  EXPECT_EQ(c.return_levels.horizons, (std::vector<int>{20, 30, 50}));
  EXPECT_TRUE(std::filesystem::path(c.coast_grid).is_absolute());
  EXPECT_TRUE(std::filesystem::exists(c.coast_grid));
  EXPECT_TRUE(std::filesystem::exists(c.rmax_table));
  EXPECT_NO_THROW(c.validate_for_simulation());
}

TEST(Config, MissingKFailsSimulationChecks) {
  json j = {{"windfield", {{"omega", 7.2982e-4}}}, {"coast_grid", "c.csv"}, {"rmax_table", "r.csv"}};
  const auto c = config_from_json(j, "/tmp");
  EXPECT_NO_THROW(c.validate());
  try {
    c.validate_for_simulation();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("windfield.K"), std::string::npos);
    EXPECT_EQ(e.exit_code(), 2);
  }
}

TEST(Config, SeedRequiredWhenAsked) {
  const auto c = config_from_json(json::object());
  EXPECT_FALSE(c.seed);
  EXPECT_THROW((void)c.require_seed(), ConfigError);
  EXPECT_EQ(config_from_json({{"seed", 7}}).require_seed(), 7u);
}

TEST(Config, BadValuesAreConfigErrors) {
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
  EXPECT_THROW(config_from_json({{"min_lifetime", "many"}}), ConfigError);
  EXPECT_THROW(config_from_json({{"windfield", {{"metric", "taxicab"}}}}), ConfigError);
  EXPECT_THROW(config_from_json({{"min_lifetime", 0}}).validate(), ConfigError);
  EXPECT_THROW(config_from_json({{"simulation", {{"trials", 0}}}}).validate(), ConfigError);
  EXPECT_THROW(config_from_json({{"return_levels", {{"horizons", {20, 1}}}}}).validate(), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/hurisk.json"), ConfigError);
  const auto dir = scratch("badjson");
  io::write_file((dir / "c.json").string(), "{ nope");
  EXPECT_THROW(load_config((dir / "c.json").string()), ConfigError);
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
  const auto c = config_from_json({{"coast_grid", "../data/coast.csv"}, {"out_dir", "/abs/out"}}, "/etc/hurisk");
  EXPECT_EQ(c.coast_grid, "/etc/data/coast.csv");
  EXPECT_EQ(c.out_dir, "/abs/out");
}

TEST(Config, WorkersAndSeedPropagate) {
  const auto c = config_from_json({{"workers", 3}, {"seed", 11}, {"windfield", {{"ambient_pressure", 1010.0}}}});
  EXPECT_EQ(c.trend.window.workers, 3u);
  EXPECT_EQ(c.simulation.workers, 3u);
  EXPECT_EQ(c.simulation.seed, 11u);
  EXPECT_EQ(c.simulation.filling.ambient, 1010.0);
}

TEST(Manifest, HashesInputsAndArtifacts) {
  const auto dir = scratch("manifest");
  const auto in = (dir / "in.txt").string(), out = (dir / "out.csv").string();
  io::write_file(in, "abc");
  io::write_file(out, "");
  io::Manifest m("ingest", {{"seed", 1}});
  m.input(in);
  m.input((dir / "missing").string());
  m.artifact(out);
  m.timing("ingest", 0.5);
  m.note("events", 12);
  const auto j = m.to_json();
  EXPECT_EQ(j.at("version"), io::kToolVersion);
  EXPECT_EQ(j.at("command"), "ingest");
  EXPECT_EQ(j.at("inputs").at(in), io::sha256_hex("abc"));
  EXPECT_FALSE(j.at("inputs").contains((dir / "missing").string()));
  EXPECT_EQ(j.at("artifacts").at(out), io::sha256_hex(""));
  EXPECT_EQ(j.at("config_sha256"), io::sha256_hex(json({{"seed", 1}}).dump()));
  m.write((dir / "manifest.json").string());
  EXPECT_EQ(io::read_json((dir / "manifest.json").string()), j);
}

TEST(Files, ReadMissingIsDataError) {
  EXPECT_THROW(io::read_file("/nonexistent/file"), DataError);
  const auto dir = scratch("files");
  io::write_file((dir / "a/b/c.txt").string(), "x");
  EXPECT_EQ(io::read_file((dir / "a/b/c.txt").string()), "x");
}
