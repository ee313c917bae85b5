// SPDX-License-Identifier: Apache-2.0
//
// rpabeam - hybrid beamforming with pattern-reconfigurable antennas
// Copyright (C) 2026 the rpabeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpabeam/baselines.hpp"
#include "rpabeam/dataset.hpp"
#include "rpabeam/prhbfnet.hpp"

namespace rpabeam {

enum class Solver { fixed, random, greedy, exhaustive, prhbfnet };

/// Maps "fixed" / "random" / "greedy" / "exhaustive" / "prhbfnet"; throws
/// ConfigError for anything else.
Solver solver_from_name(const std::string& name);
std::string solver_name(Solver solver);

struct EvalOptions {
    Solver solver = Solver::fixed;
    int fixed_mode = 0;              ///< Solver::fixed, 0-based
    std::uint64_t random_seed = 1;   ///< Solver::random, per-sample streams
    GreedyConfig greedy;             ///< Solver::greedy
    std::uint64_t exhaustive_cap = 4096; ///< Solver::exhaustive
    const PrHbfNet* net = nullptr;   ///< Solver::prhbfnet
    std::uint64_t max_samples = 0;   ///< 0 = whole dataset
    /// When positive, replaces the dataset's power budget for the
    /// closed-form solvers (the channel tensors are power independent).
    double pt_watts_override = 0.0;
};

struct EvalStats {
    double mean_se = 0.0;
    double std_se = 0.0; ///< sample standard deviation (n-1), 0 when n < 2
    std::vector<double> per_sample;
};

/// Runs one solver over the dataset and collects the realized rates.
EvalStats evaluate_dataset(const DatasetReader& data, const EvalOptions& opts);

/// Mean and sample standard deviation of a rate list.
EvalStats summarize(std::vector<double> per_sample);

} // namespace rpabeam
