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
#include <random>
#include <sstream>

#include "hurisk/coast.hpp"

using namespace hurisk;
using namespace hurisk::coast;

namespace {

const CoastGrid& bundled() {
  static const CoastGrid g = CoastGrid::from_file(std::string(HURISK_SOURCE_DIR) + "/data/coast_grid.csv");
  return g;
}

// Endpoint distance when the projection falls outside the segment, otherwise
// |cross product| / length.
double oracle_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  const double ax = p.lon - a.lon, ay = p.lat - a.lat;
  const double bx = p.lon - b.lon, by = p.lat - b.lat;
  const double sx = b.lon - a.lon, sy = b.lat - a.lat;
  if (ax * sx + ay * sy <= 0) return std::sqrt(ax * ax + ay * ay);
  if (bx * sx + by * sy >= 0) return std::sqrt(bx * bx + by * by);
  return std::abs(sx * ay - sy * ax) / std::sqrt(sx * sx + sy * sy);
}

int region_index(const std::string& name) {
  const auto& r = bundled().regions();
  return static_cast<int>(std::find(r.begin(), r.end(), name) - r.begin());
}

}  // namespace

TEST(CoastGrid, BundledGridHasStandardRegions) {
  const auto& g = bundled();
  ASSERT_EQ(g.regions().size(), 13u);
  std::vector<std::string> a = g.regions(), b = standard_regions();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(CoastGrid, BruteForceDistance) {
  const auto& g = bundled();
  const auto& v = g.vertices();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(20, 46), lon(-100, -65);
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const GeoPoint p{lat(rng), lon(rng)};
    double best = std::numeric_limits<double>::infinity();
    std::size_t seg = 0;
    for (std::size_t s = 0; s + 1 < v.size(); ++s) {
      const double d = oracle_distance(p, v[s], v[s + 1]);
      if (d < best) {
        best = d;
        seg = s;
      }
    }
    const auto n = g.nearest(p);
    worst = std::max(worst, std::abs(n.distance - best));
    const auto w = g.nearest_within(p, 2.0);
    if (best <= 2.0 - 1e-9) {
      ASSERT_TRUE(w);
      EXPECT_NEAR(w->distance, best, 1e-9);
      if (std::abs(oracle_distance(p, v[w->segment], v[w->segment + 1]) - oracle_distance(p, v[seg], v[seg + 1])) > 1e-9)
        ADD_FAILURE() << "different nearest segment";
    } else if (best > 2.0 + 1e-9) {
      EXPECT_FALSE(w);
    }
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(CoastGrid, FootLiesOnSegment) {
  const auto& g = bundled();
  const GeoPoint p{27.0, -79.0};
  const auto n = g.nearest(p);
  EXPECT_NEAR(std::hypot(p.lat - n.foot.lat, p.lon - n.foot.lon), n.distance, 1e-12);
  const auto& a = g.vertices()[n.segment];
  const auto& b = g.vertices()[n.segment + 1];
  EXPECT_NEAR(oracle_distance(n.foot, a, b), 0.0, 1e-12);
  EXPECT_LT(n.side, 0.0);  // offshore of the Atlantic coast is to the right
}

TEST(CoastalClassify, OffshoreTrackHasNoHits) {
  const std::vector<GeoPoint> track{{20.0, -60.0}, {22.0, -62.0}, {24.0, -64.0}, {30.0, -70.0}};
  const std::vector<double> v{30, 40, 50, 60};
  const auto h = coastal_classify(track, v, bundled(), 2.0);
  EXPECT_FALSE(h.any());
  for (std::size_t r = 0; r < 13; ++r) EXPECT_FALSE(h.hit(static_cast<int>(r)));
}

TEST(CoastalClassify, TrackOverFloridaVertex) {
  const std::vector<GeoPoint> track{{25.0, -75.0}, {26.1, -81.8}, {27.0, -84.0}};
  const std::vector<double> v{10, 55, 20};
  const auto h = coastal_classify(track, v, bundled(), 2.0);
  const int fl = region_index("Florida");
  EXPECT_TRUE(h.hit(fl));
  EXPECT_EQ(h.step_region[1], fl);
  EXPECT_EQ(h.region_max[static_cast<std::size_t>(fl)], 55);
  EXPECT_EQ(h.step_region[0], -1);
}

TEST(CoastalClassify, RegionMaxIsMaxOverOnCoastSteps) {
  const std::vector<GeoPoint> track{{29.5, -94.5}, {29.6, -94.3}, {30.5, -94.0}, {35.0, -94.0}};
  const std::vector<double> v{20, 35, 30, 99};
  const auto h = coastal_classify(track, v, bundled(), 2.0);
  EXPECT_EQ(h.step_region[3], -1);
  double m = 0;
  for (std::size_t r = 0; r < 13; ++r)
    if (h.hit(static_cast<int>(r))) m = std::max(m, h.region_max[r]);
  EXPECT_EQ(m, 35);
}

TEST(CoastGrid, RejectsNonContiguousRegions) {
  std::istringstream csv("lon,lat,region\n-90,29,A\n-89,29,B\n-88,29,A\n-87,29,A\n");
  EXPECT_THROW(CoastGrid::from_csv(csv), DataError);
  std::istringstream ok("-90,29,A\n-89,29,B\n-88,29,B\n");
  EXPECT_EQ(CoastGrid::from_csv(ok).regions().size(), 2u);
}
