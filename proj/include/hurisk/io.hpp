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

// Serialization of fitted models, comma-separated tables, content hashes and
// run manifests.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/occurrence.hpp"
#include "hurisk/simulate.hpp"

namespace hurisk::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

inline void write_file(const std::string& path, std::string_view content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

/// Shortest text that reads back to the same double.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Minimal CSV table builder; fields containing commas or quotes are quoted.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) { row(header); }

  template <class... T>
  Csv& add(const T&... fields) {
    std::vector<std::string> r{cell(fields)...};
    return row(r);
  }
  Csv& row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) text_ += ',';
      text_ += quote(fields[i]);
    }
    text_ += '\n';
    return *this;
  }
  [[nodiscard]] const std::string& str() const noexcept { return text_; }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return num(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }
  std::string text_;
};

// ---------------------------------------------------------------------------
// Models.

inline json coefficients_json(const evt::Coefficients& c) {
  json j;
  const auto a = c.as_array();
  for (std::size_t i = 0; i < 6; ++i) j[evt::Coefficients::names[i]] = a[i];
  return j;
}

inline evt::Coefficients coefficients_from_json(const json& j) {
  std::array<double, 6> a{};
  for (std::size_t i = 0; i < 6; ++i) {
    const char* n = evt::Coefficients::names[i];
    if (!j.contains(n)) throw DataError(std::string("model file lacks '") + n + "'");
    a[i] = j.at(n).get<double>();
  }
  return evt::Coefficients::from_array(a);
}

inline json to_json(const evt::NsGevModel& m) {
  json j = coefficients_json(m.coef);
  j["kind"] = evt::to_string(m.kind);
  j["stationary"] = m.stationary;
  j["se"] = coefficients_json(m.se);
  j["covariance"] = m.covariance;
  j["loglik"] = m.loglik;
  j["n"] = m.n;
  j["convergence"] = {{"converged", m.convergence.converged},
                      {"evaluations", m.convergence.evaluations},
                      {"restarts_used", m.convergence.restarts_used},
                      {"diameter", m.convergence.diameter},
                      {"message", m.convergence.message}};
  return j;
}

inline evt::NsGevModel gev_model_from_json(const json& j) {
  try {
    evt::NsGevModel m;
    m.kind = evt::model_kind_from_string(j.at("kind").get<std::string>());
    m.stationary = j.value("stationary", false);
    m.coef = coefficients_from_json(j);
    if (j.contains("se")) m.se = coefficients_from_json(j.at("se"));
    m.covariance = j.value("covariance", std::vector<double>{});
    m.loglik = j.value("loglik", 0.0);
    m.n = j.value("n", std::size_t{0});
    if (j.contains("convergence")) {
      const auto& c = j.at("convergence");
      m.convergence.converged = c.value("converged", false);
      m.convergence.evaluations = c.value("evaluations", 0);
      m.convergence.restarts_used = c.value("restarts_used", 0);
      m.convergence.diameter = c.value("diameter", 0.0);
      m.convergence.message = c.value("message", std::string{});
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline json to_json(const occurrence::RateModel& m) {
  return {{"a", m.a},           {"b", m.b},           {"se", {{"a", m.se_a}, {"b", m.se_b}}},
          {"ci95", {{"a", {m.ci_a_low, m.ci_a_high}}, {"b", {m.ci_b_low, m.ci_b_high}}}},
          {"loglik", m.loglik}, {"base_year", m.base_year}, {"iterations", m.iterations}};
}

inline occurrence::RateModel rate_model_from_json(const json& j) {
  try {
    occurrence::RateModel m;
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    if (j.contains("se")) {
      m.se_a = j.at("se").value("a", 0.0);
      m.se_b = j.at("se").value("b", 0.0);
    }
    if (j.contains("ci95")) {
      const auto& c = j.at("ci95");
      m.ci_a_low = c.at("a").at(0).get<double>();
      m.ci_a_high = c.at("a").at(1).get<double>();
      m.ci_b_low = c.at("b").at(0).get<double>();
      m.ci_b_high = c.at("b").at(1).get<double>();
    }
    m.loglik = j.value("loglik", 0.0);
    m.base_year = j.value("base_year", kBaseYear);
    m.iterations = j.value("iterations", 0);
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed rate model file: ") + e.what());
  }
}

inline json to_json(const simulate::PressureRangeModel& m) {
  return {{"a", m.a}, {"b", m.b}, {"c", m.c}, {"se", {{"a", m.se_a}, {"b", m.se_b}, {"c", m.se_c}}}};
}

inline simulate::PressureRangeModel range_model_from_json(const json& j) {
  simulate::PressureRangeModel m{j.at("a").get<double>(), j.at("b").get<double>(), j.at("c").get<double>()};
  if (j.contains("se")) {
    m.se_a = j.at("se").value("a", 0.0);
    m.se_b = j.at("se").value("b", 0.0);
    m.se_c = j.at("se").value("c", 0.0);
  }
  return m;
}

inline json to_json(const simulate::RatioDensity& d) { return {{"edges", d.edges}, {"mass", d.mass}}; }

inline simulate::RatioDensity ratio_from_json(const json& j) {
  simulate::RatioDensity d{j.at("edges").get<std::vector<double>>(), j.at("mass").get<std::vector<double>>()};
  d.validate();
  return d;
}

inline json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json(const std::string& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Run manifest.

class Manifest {
 public:
  Manifest(std::string command, json config) : command_(std::move(command)), config_(std::move(config)) {}

  void input(const std::string& path) {
    if (std::filesystem::exists(path)) inputs_[path] = sha256_file(path);
  }
  void artifact(const std::string& path) { artifacts_[path] = sha256_file(path); }
  void timing(const std::string& stage, double seconds) { timings_[stage] = seconds; }
  void note(const std::string& key, json value) { notes_[key] = std::move(value); }

  [[nodiscard]] json to_json() const {
    return {{"tool", "hurisk"},
            {"version", kToolVersion},
            {"command", command_},
            {"config_sha256", sha256_hex(config_.dump())},
            {"config", config_},
            {"inputs", inputs_},
            {"artifacts", artifacts_},
            {"timings_s", timings_},
            {"notes", notes_}};
  }

  void write(const std::string& path) const { write_json(path, to_json()); }

 private:
  std::string command_;
  json config_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> artifacts_;
  std::map<std::string, double> timings_;
  json notes_ = json::object();
};

/// Wall-clock seconds since construction.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace hurisk::io
