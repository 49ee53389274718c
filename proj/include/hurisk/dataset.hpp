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

#include <vector>

#include "hurisk/evt.hpp"
#include "hurisk/hurdat2.hpp"

namespace hurisk {

inline constexpr int kBaseYear = 1851;

/// Negated pressure minima with their covariates, ready for GEV fitting.
struct GevSample {
  std::vector<double> data;
  std::vector<evt::Covariates> covariates;
  std::vector<int> years;
  std::size_t excluded = 0;  // events outside the model's covariate domain

  [[nodiscard]] std::size_t size() const noexcept { return data.size(); }
};

inline evt::Covariates covariates_of(const hurdat2::HurricaneEvent& e, int base_year = kBaseYear) {
  return {e.lifetime, e.phi_pmin, e.year - base_year};
}

inline bool matches(const hurdat2::HurricaneEvent& e, evt::ModelKind kind) {
  return e.is_landfalling == (kind == evt::ModelKind::landfalling);
}

/// Events of one kind. Nonlandfalling events in the base year (t_yr = 0) are
/// excluded since the nonstationary location uses log(t_yr).
inline GevSample gev_sample(const std::vector<hurdat2::HurricaneEvent>& events, evt::ModelKind kind,
                            int base_year = kBaseYear) {
  GevSample s;
  for (const auto& e : events) {
    if (!matches(e, kind)) continue;
    const auto c = covariates_of(e, base_year);
    if (kind == evt::ModelKind::nonlandfalling && c.t_yr < 1) {
      ++s.excluded;
      continue;
    }
    s.data.push_back(-e.p_min);
    s.covariates.push_back(c);
    s.years.push_back(e.year);
  }
  return s;
}

}  // namespace hurisk
