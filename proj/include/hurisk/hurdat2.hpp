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

// Reader/writer for the NOAA HURDAT2 best-track text format and derivation
// of per-event quantities (lifetime, pressure minimum, landfall).
//
// A storm is a header line
//   AL011851,            UNNAMED,     14,
// followed by exactly that many data lines
//   18510625, 0000,  , HU, 28.0N,  94.8W,  80, -999, -999, ... ,
// with fields date, time, record identifier, status, latitude, longitude,
// maximum wind (kt), minimum pressure (hPa) and wind radii. -99 / -999 mark
// missing values.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hurisk/error.hpp"

namespace hurisk::hurdat2 {

struct Timestamp {
  int year = 0;
  int month = 0;
  int day = 0;
  int hour = 0;
  int minute = 0;

  [[nodiscard]] bool synoptic() const noexcept { return minute == 0 && hour % 6 == 0; }
  [[nodiscard]] long long key() const noexcept {
    return ((((static_cast<long long>(year) * 100 + month) * 100 + day) * 100 + hour) * 100) +
           minute;
  }
  friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

struct TrackPoint {
  Timestamp time;
  char record_id = ' ';  // 'L' marks landfall
  std::string status;
  double lat_deg = 0.0;  // degrees north
  double lon_deg = 0.0;  // degrees east, west negative
  std::optional<double> max_wind_kt;
  std::optional<double> central_pressure_hpa;
  std::vector<int> extra;  // wind radii and later columns, kept verbatim

  [[nodiscard]] bool is_landfall() const noexcept { return record_id == 'L'; }
  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct StormRecord {
  std::string storm_id;
  std::string name;
  std::vector<TrackPoint> points;
  friend bool operator==(const StormRecord&, const StormRecord&) = default;
};

struct HurricaneEvent {
  std::string storm_id;
  std::string name;
  int year = 0;
  std::vector<TrackPoint> track;  // synoptic (6-hourly) points only
  int lifetime = 0;               // T, number of retained points
  double p_min = 0.0;
  int t_pmin = 0;
  double phi_pmin = 0.0;
  bool is_landfalling = false;
  std::optional<int> t_lf;

  [[nodiscard]] int t_yr(int base_year = 1851) const noexcept { return year - base_year; }
};

struct SkipReport {
  std::size_t below_min_lifetime = 0;
  std::vector<std::string> no_pressure;
  std::size_t pressure_out_of_range = 0;
};

/// Yearly event counts over a contiguous span, zero filled.
struct YearlyCounts {
  int first_year = 0;
  std::vector<int> counts;

  [[nodiscard]] int last_year() const noexcept {
    return first_year + static_cast<int>(counts.size()) - 1;
  }
  [[nodiscard]] bool contains(int year) const noexcept {
    return year >= first_year && year <= last_year();
  }
  [[nodiscard]] int at(int year) const { return counts.at(static_cast<std::size_t>(year - first_year)); }
  [[nodiscard]] long long total() const noexcept {
    long long t = 0;
    for (int c : counts) t += c;
    return t;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  // A trailing comma leaves one empty field behind.
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

inline bool parse_int(std::string_view s, int& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
}

inline bool parse_double(std::string_view s, double& v) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && !s.empty();
}

inline bool looks_like_header(const std::vector<std::string_view>& f) {
  return f.size() == 3 && f[0].size() == 8 && std::isalpha(static_cast<unsigned char>(f[0][0])) &&
         std::isalpha(static_cast<unsigned char>(f[0][1]));
}

inline double parse_coordinate(std::string_view s, char pos, char neg, std::size_t line,
                               const char* what) {
  if (s.size() < 2) throw ParseError(line, std::string("non-numeric ") + what);
  const char hemi = s.back();
  double v = 0.0;
  if ((hemi != pos && hemi != neg) || !parse_double(s.substr(0, s.size() - 1), v))
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(s) + "'");
  return hemi == neg ? -v : v;
}

inline TrackPoint parse_data_line(const std::vector<std::string_view>& f, std::size_t line) {
  if (f.size() < 8)
    throw ParseError(line, "data line has " + std::to_string(f.size()) + " fields, expected >= 8");
  TrackPoint p;
  int date = 0, hm = 0;
  if (f[0].size() != 8 || !parse_int(f[0], date)) throw ParseError(line, "bad date field");
  if (f[1].size() != 4 || !parse_int(f[1], hm)) throw ParseError(line, "bad time field");
  p.time = {date / 10000, (date / 100) % 100, date % 100, hm / 100, hm % 100};
  if (p.time.month < 1 || p.time.month > 12 || p.time.day < 1 || p.time.day > 31 ||
      p.time.hour > 23 || p.time.minute > 59)
    throw ParseError(line, "timestamp out of range");
  if (f[2].size() > 1) throw ParseError(line, "record identifier must be one character");
  p.record_id = f[2].empty() ? ' ' : f[2][0];
  p.status = std::string(f[3]);
  p.lat_deg = parse_coordinate(f[4], 'N', 'S', line, "latitude");
  p.lon_deg = parse_coordinate(f[5], 'E', 'W', line, "longitude");
  if (p.lat_deg < 0.0 || p.lat_deg > 90.0) throw ParseError(line, "latitude outside [0, 90]");
  if (p.lon_deg < -180.0 || p.lon_deg > 180.0) throw ParseError(line, "longitude outside [-180, 180]");
  int wind = 0, pres = 0;
  if (!parse_int(f[6], wind)) throw ParseError(line, "non-numeric maximum wind");
  if (!parse_int(f[7], pres)) throw ParseError(line, "non-numeric pressure");
  if (wind >= 0) p.max_wind_kt = wind;
  if (pres > 0) p.central_pressure_hpa = pres;
  for (std::size_t i = 8; i < f.size(); ++i) {
    int v = 0;
    if (!parse_int(f[i], v)) throw ParseError(line, "non-numeric field " + std::to_string(i + 1));
    p.extra.push_back(v);
  }
  return p;
}

}  // namespace detail

/// Parses a HURDAT2 stream into raw storm records.
inline std::vector<StormRecord> parse(std::istream& in) {
  std::vector<StormRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t remaining = 0;
  std::size_t header_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto trimmed = detail::trim(raw);
    if (trimmed.empty()) continue;
    const auto f = detail::split_fields(trimmed);
    if (remaining == 0) {
      if (f.size() != 3)
        throw ParseError(line_no, "malformed header: " + std::to_string(f.size()) +
                                      " fields, expected 3");
      int count = 0;
      if (!detail::parse_int(f[2], count) || count < 0)
        throw ParseError(line_no, "malformed header: bad record count");
      records.push_back({std::string(f[0]), std::string(f[1]), {}});
      remaining = static_cast<std::size_t>(count);
      header_line = line_no;
      continue;
    }
    if (detail::looks_like_header(f))
      throw DataError("storm " + records.back().storm_id + " (line " +
                      std::to_string(header_line) + ") declares " +
                      std::to_string(records.back().points.size() + remaining) +
                      " data lines but only " + std::to_string(records.back().points.size()) +
                      " precede the next header at line " + std::to_string(line_no));
    records.back().points.push_back(detail::parse_data_line(f, line_no));
    --remaining;
  }
  if (remaining != 0)
    throw DataError("storm " + records.back().storm_id + " (line " + std::to_string(header_line) +
                    ") is missing " + std::to_string(remaining) + " data lines at end of input");
  return records;
}

inline std::vector<StormRecord> parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

/// Writes records in the HURDAT2 column layout.
inline void write(std::ostream& out, const std::vector<StormRecord>& records) {
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%-8s, %18s, %6zu,\n", r.storm_id.c_str(), r.name.c_str(),
                  r.points.size());
    out << buf;
    for (const auto& p : r.points) {
      const int wind = p.max_wind_kt ? static_cast<int>(std::lround(*p.max_wind_kt)) : -99;
      const int pres = p.central_pressure_hpa ? static_cast<int>(std::lround(*p.central_pressure_hpa)) : -999;
      std::snprintf(buf, sizeof buf, "%04d%02d%02d, %02d%02d, %c, %2s, %4.1f%c, %5.1f%c, %3d, %4d,",
                    p.time.year, p.time.month, p.time.day, p.time.hour, p.time.minute, p.record_id,
                    p.status.c_str(), std::abs(p.lat_deg), p.lat_deg < 0 ? 'S' : 'N',
                    std::abs(p.lon_deg), p.lon_deg < 0 ? 'W' : 'E', wind, pres);
      out << buf;
      for (int v : p.extra) {
        std::snprintf(buf, sizeof buf, " %4d,", v);
        out << buf;
      }
      out << '\n';
    }
  }
}

/// Derives hurricane events. Events shorter than min_lifetime or without any
/// pressure reading are dropped and tallied in `skips`.
inline std::vector<HurricaneEvent> to_events(const std::vector<StormRecord>& records,
                                             int min_lifetime, SkipReport* skips = nullptr) {
  if (min_lifetime < 1) throw ConfigError("min_lifetime must be >= 1");
  SkipReport local;
  SkipReport& report = skips ? *skips : local;
  std::vector<HurricaneEvent> events;
  for (const auto& r : records) {
    HurricaneEvent e;
    e.storm_id = r.storm_id;
    e.name = r.name;
    std::optional<long long> first_landfall;
    for (const auto& p : r.points) {
      if (p.is_landfall() && !first_landfall) first_landfall = p.time.key();
      if (p.time.synoptic()) e.track.push_back(p);
    }
    e.lifetime = static_cast<int>(e.track.size());
    if (e.lifetime < min_lifetime) {
      ++report.below_min_lifetime;
      continue;
    }
    e.year = e.track.front().time.year;
    e.p_min = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < e.track.size(); ++i) {
      auto& pr = e.track[i].central_pressure_hpa;
      if (pr && (*pr <= 850.0 || *pr >= 1050.0)) {
        ++report.pressure_out_of_range;
        pr.reset();
      }
      if (pr && *pr < e.p_min) {
        e.p_min = *pr;
        e.t_pmin = static_cast<int>(i);
        any = true;
      }
    }
    if (!any) {
      report.no_pressure.push_back(r.storm_id);
      continue;
    }
    e.phi_pmin = e.track[static_cast<std::size_t>(e.t_pmin)].lat_deg;
    if (first_landfall) {
      e.is_landfalling = true;
      // Last retained point at or before the first landfall line.
      int idx = 0;
      for (std::size_t i = 0; i < e.track.size(); ++i)
        if (e.track[i].time.key() <= *first_landfall) idx = static_cast<int>(i);
      e.t_lf = idx;
    }
    events.push_back(std::move(e));
  }
  return events;
}

inline std::vector<HurricaneEvent> filter_years(const std::vector<HurricaneEvent>& events,
                                                int first_year, int last_year) {
  std::vector<HurricaneEvent> out;
  for (const auto& e : events)
    if (e.year >= first_year && e.year <= last_year) out.push_back(e);
  return out;
}

/// Zero-filled yearly counts of events with lifetime >= min_lifetime over
/// [first_year, last_year].
inline YearlyCounts yearly_counts(const std::vector<HurricaneEvent>& events, int min_lifetime,
                                  int first_year, int last_year) {
  if (last_year < first_year) throw ConfigError("yearly_counts: empty year span");
  YearlyCounts yc{first_year, std::vector<int>(static_cast<std::size_t>(last_year - first_year + 1), 0)};
  for (const auto& e : events)
    if (e.lifetime >= min_lifetime && yc.contains(e.year))
      ++yc.counts[static_cast<std::size_t>(e.year - first_year)];
  return yc;
}

/// Same, spanning the years present in `events`.
inline YearlyCounts yearly_counts(const std::vector<HurricaneEvent>& events, int min_lifetime) {
  if (events.empty()) return {};
  const auto [lo, hi] = std::minmax_element(events.begin(), events.end(),
                                            [](const auto& a, const auto& b) { return a.year < b.year; });
  return yearly_counts(events, min_lifetime, lo->year, hi->year);
}

}  // namespace hurisk::hurdat2
