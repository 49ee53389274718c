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

// Coarse coastline polyline divided into named contiguous regions. Distances
// are planar in degrees (longitude, latitude). The polyline is ordered so
// that land lies to the left of the direction of travel.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hurisk/error.hpp"
#include "hurisk/windfield.hpp"

namespace hurisk::coast {

using windfield::GeoPoint;

inline const std::vector<std::string>& standard_regions() {
  static const std::vector<std::string> names{
      "N-Texas",         "S-Texas",        "W-Louisiana",    "E-Louisiana",    "Mississippi",
      "Alabama-Florida", "Florida",        "Florida-Georgia", "South Carolina", "North Carolina",
      "Virginia",        "Maryland-New Jersey", "Connecticut-Massachusetts-New Hampshire"};
  return names;
}

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t segment = 0;
  int region = -1;
  double side = 0.0;  // > 0 when the point lies left of (landward of) the segment
  GeoPoint foot;      // closest point on the coastline
};

/// Distance from p to segment [a, b] in the (lon, lat) plane.
inline double segment_distance(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b, double* cross = nullptr,
                               GeoPoint* foot = nullptr) {
  const double dx = b.lon - a.lon, dy = b.lat - a.lat;
  const double px = p.lon - a.lon, py = p.lat - a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? (px * dx + py * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  if (cross) *cross = dx * py - dy * px;
  if (foot) *foot = {a.lat + t * dy, a.lon + t * dx};
  return std::hypot(px - t * dx, py - t * dy);
}

class CoastGrid {
 public:
  CoastGrid() = default;

  /// Vertex i carries the region of the segment [i, i+1]; the region of the
  /// final vertex is ignored.
  CoastGrid(std::vector<GeoPoint> vertices, std::vector<int> vertex_region, std::vector<std::string> regions,
            double index_cell = 2.0)
      : vertices_(std::move(vertices)), vertex_region_(std::move(vertex_region)), regions_(std::move(regions)) {
    validate();
    build_index(index_cell);
  }

  [[nodiscard]] const std::vector<GeoPoint>& vertices() const noexcept { return vertices_; }
  [[nodiscard]] const std::vector<std::string>& regions() const noexcept { return regions_; }
  [[nodiscard]] std::size_t segments() const noexcept { return vertices_.empty() ? 0 : vertices_.size() - 1; }
  [[nodiscard]] int segment_region(std::size_t s) const { return vertex_region_.at(s); }

  void validate() const {
    if (vertices_.size() < 2) throw DataError("coast grid needs at least two vertices");
    if (vertex_region_.size() != vertices_.size()) throw DataError("coast grid: region per vertex required");
    std::set<int> closed;
    int current = -1;
    for (std::size_t s = 0; s + 1 < vertices_.size(); ++s) {
      const int r = vertex_region_[s];
      if (r < 0 || r >= static_cast<int>(regions_.size())) throw DataError("coast grid: bad region index");
      if (r != current) {
        if (closed.count(r)) throw DataError("coast grid: region '" + regions_[static_cast<std::size_t>(r)] + "' is not contiguous");
        if (current >= 0) closed.insert(current);
        current = r;
      }
    }
    closed.insert(current);
    if (closed.size() != regions_.size()) throw DataError("coast grid: some regions own no segment");
  }

  /// Exact nearest segment by scanning every segment.
  [[nodiscard]] Nearest nearest(const GeoPoint& p) const {
    Nearest best;
    for (std::size_t s = 0; s + 1 < vertices_.size(); ++s) consider(p, s, best);
    return best;
  }

  /// Nearest segment if it lies within `buffer` degrees. Uses the cell index
  /// when buffer <= the index cell size, otherwise scans every segment.
  [[nodiscard]] std::optional<Nearest> nearest_within(const GeoPoint& p, double buffer) const {
    if (buffer > index_cell_) {
      auto n = nearest(p);
      if (n.distance <= buffer) return n;
      return std::nullopt;
    }
    const auto it = cells_.find(cell_key(p));
    if (it == cells_.end()) return std::nullopt;
    Nearest best;
    for (auto s : it->second) consider(p, s, best);
    if (best.distance <= buffer) return best;
    return std::nullopt;
  }

  static CoastGrid from_csv(std::istream& in) {
    std::vector<GeoPoint> v;
    std::vector<int> vr;
    std::vector<std::string> names;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string a, b, c;
      if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
        throw DataError("coast grid line " + std::to_string(n) + ": expected lon,lat,region");
      double lon = 0, lat = 0;
      try {
        lon = std::stod(a);
        lat = std::stod(b);
      } catch (const std::invalid_argument&) {
        if (v.empty()) continue;  // header row
        throw DataError("coast grid line " + std::to_string(n) + ": non-numeric coordinate");
      }
      auto found = std::find(names.begin(), names.end(), c);
      if (found == names.end()) {
        names.push_back(c);
        found = std::prev(names.end());
      }
      v.push_back({lat, lon});
      vr.push_back(static_cast<int>(found - names.begin()));
    }
    return CoastGrid(std::move(v), std::move(vr), std::move(names));
  }

  static CoastGrid from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coast grid '" + path + "'");
    return from_csv(in);
  }

 private:
  void consider(const GeoPoint& p, std::size_t s, Nearest& best) const {
    double cross = 0.0;
    GeoPoint foot;
    const double d = segment_distance(p, vertices_[s], vertices_[s + 1], &cross, &foot);
    if (d < best.distance) best = {d, s, vertex_region_[s], cross, foot};
  }

  [[nodiscard]] long long cell_key(const GeoPoint& p) const {
    const auto cx = static_cast<long long>(std::floor(p.lon / index_cell_));
    const auto cy = static_cast<long long>(std::floor(p.lat / index_cell_));
    return cx * 1000003LL + cy;
  }

  // Every segment is registered in each cell its bounding box, grown by one
  // cell size, touches; a query within one cell size therefore sees every
  // candidate segment.
  void build_index(double cell) {
    if (!(cell > 0.0)) throw ConfigError("coast index cell size must be positive");
    index_cell_ = cell;
    cells_.clear();
    const double buffer = cell;
    for (std::size_t s = 0; s + 1 < vertices_.size(); ++s) {
      const auto& a = vertices_[s];
      const auto& b = vertices_[s + 1];
      const auto x0 = static_cast<long long>(std::floor((std::min(a.lon, b.lon) - buffer) / cell));
      const auto x1 = static_cast<long long>(std::floor((std::max(a.lon, b.lon) + buffer) / cell));
      const auto y0 = static_cast<long long>(std::floor((std::min(a.lat, b.lat) - buffer) / cell));
      const auto y1 = static_cast<long long>(std::floor((std::max(a.lat, b.lat) + buffer) / cell));
      for (auto x = x0; x <= x1; ++x)
        for (auto y = y0; y <= y1; ++y) cells_[x * 1000003LL + y].push_back(s);
    }
  }

  std::vector<GeoPoint> vertices_;
  std::vector<int> vertex_region_;
  std::vector<std::string> regions_;
  double index_cell_ = 2.0;
  std::unordered_map<long long, std::vector<std::size_t>> cells_;
};

struct CoastalHits {
  std::vector<int> step_region;    // -1 when the eye is off the coast
  std::vector<double> region_max;  // per region; NaN when not hit
  [[nodiscard]] bool hit(int region) const { return !std::isnan(region_max.at(static_cast<std::size_t>(region))); }
  [[nodiscard]] bool any() const {
    return std::any_of(step_region.begin(), step_region.end(), [](int r) { return r >= 0; });
  }
};

/// Assigns each step within `buffer` degrees of the coastline to the region
/// of the nearest segment and records the per-region maximum windspeed.
inline CoastalHits coastal_classify(std::span<const GeoPoint> track, std::span<const double> windspeed,
                                    const CoastGrid& grid, double buffer) {
  CoastalHits h;
  h.step_region.assign(track.size(), -1);
  h.region_max.assign(grid.regions().size(), std::nan(""));
  for (std::size_t t = 0; t < track.size(); ++t) {
    const auto n = grid.nearest_within(track[t], buffer);
    if (!n) continue;
    h.step_region[t] = n->region;
    auto& m = h.region_max[static_cast<std::size_t>(n->region)];
    const double v = t < windspeed.size() ? windspeed[t] : 0.0;
    if (std::isnan(m) || v > m) m = v;
  }
  return h;
}

}  // namespace hurisk::coast
