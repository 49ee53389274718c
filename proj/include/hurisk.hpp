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

#include "hurisk/coast.hpp"
#include "hurisk/config.hpp"
#include "hurisk/dataset.hpp"
#include "hurisk/error.hpp"
#include "hurisk/evt.hpp"
#include "hurisk/hurdat2.hpp"
#include "hurisk/io.hpp"
#include "hurisk/occurrence.hpp"
#include "hurisk/optimize.hpp"
#include "hurisk/parallel.hpp"
#include "hurisk/pipeline.hpp"
#include "hurisk/random.hpp"
#include "hurisk/risk.hpp"
#include "hurisk/simulate.hpp"
#include "hurisk/stats.hpp"
#include "hurisk/trend.hpp"
#include "hurisk/windfield.hpp"
