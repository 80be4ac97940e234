// Copyright 2026 The drcover Authors
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

#ifndef DRCOVER_DRCOVER_HPP_
#define DRCOVER_DRCOVER_HPP_

#include "drcover/bnc.hpp"
#include "drcover/experiments.hpp"
#include "drcover/hull_cuts.hpp"
#include "drcover/linear_cut.hpp"
#include "drcover/lp.hpp"
#include "drcover/mixing.hpp"
#include "drcover/model.hpp"
#include "drcover/risk.hpp"
#include "drcover/scenario_cuts.hpp"
#include "drcover/solvers.hpp"

#endif  // DRCOVER_DRCOVER_HPP_
