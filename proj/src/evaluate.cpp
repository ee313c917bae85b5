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

#include "rpabeam/evaluate.hpp"

#include <algorithm>
#include <cmath>

namespace rpabeam {

Solver solver_from_name(const std::string& name)
{
    if (name == "fixed")
        return Solver::fixed;
    if (name == "random")
        return Solver::random;
    if (name == "greedy")
        return Solver::greedy;
    if (name == "exhaustive")
        return Solver::exhaustive;
    if (name == "prhbfnet")
        return Solver::prhbfnet;
    throw ConfigError("unknown solver '" + name +
                      "' (expected fixed, random, greedy, exhaustive or prhbfnet)");
}

std::string solver_name(Solver solver)
{
    switch (solver) {
    case Solver::fixed:
        return "fixed";
    case Solver::random:
        return "random";
    case Solver::greedy:
        return "greedy";
    case Solver::exhaustive:
        return "exhaustive";
    case Solver::prhbfnet:
        return "prhbfnet";
    }
    return "unknown";
}

EvalStats summarize(std::vector<double> per_sample)
{
    EvalStats stats;
    const std::size_t n = per_sample.size();
    if (n == 0) {
        stats.per_sample = std::move(per_sample);
        return stats;
    }
    double acc = 0.0;
    for (double v : per_sample)
        acc += v;
    stats.mean_se = acc / static_cast<double>(n);
    if (n > 1) {
        double sq = 0.0;
        for (double v : per_sample)
            sq += (v - stats.mean_se) * (v - stats.mean_se);
        stats.std_se = std::sqrt(sq / static_cast<double>(n - 1));
    }
    stats.per_sample = std::move(per_sample);
    return stats;
}

EvalStats evaluate_dataset(const DatasetReader& data, const EvalOptions& opts)
{
    const SystemConfig& cfg = data.config();
    HbfContext ctx = HbfContext::from_config(cfg);
    if (opts.pt_watts_override > 0.0)
        ctx.pt_watts = opts.pt_watts_override;

    if (opts.solver == Solver::prhbfnet) {
        if (opts.net == nullptr)
            throw ConfigError("evaluate: solver 'prhbfnet' needs a loaded model");
        const SystemConfig& sys = opts.net->system();
        if (sys.num_subcarriers != cfg.num_subcarriers || sys.num_users != cfg.num_users ||
            sys.num_antennas != cfg.num_antennas || sys.num_patterns != cfg.num_patterns)
            throw ConfigError("evaluate: model and dataset dimensions disagree");
    }
    if (opts.solver == Solver::fixed &&
        (opts.fixed_mode < 0 || opts.fixed_mode >= cfg.num_patterns))
        throw ConfigError("evaluate: fixed mode " + std::to_string(opts.fixed_mode) +
                          " outside codebook of " + std::to_string(cfg.num_patterns) +
                          " modes");

    const std::uint64_t count =
        opts.max_samples == 0 ? data.size() : std::min(data.size(), opts.max_samples);
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(count));

    for (std::uint64_t i = 0; i < count; ++i) {
        const EmCsiTensor sample = data.load_sample(i);
        double se = 0.0;
        switch (opts.solver) {
        case Solver::fixed:
            se = fixed_pattern(sample, ctx, opts.fixed_mode).achieved_se;
            break;
        case Solver::random:
            se = random_pattern(sample, ctx, derive_seed(opts.random_seed, i)).achieved_se;
            break;
        case Solver::greedy:
            se = greedy_pattern_select(sample, opts.greedy, ctx).achieved_se;
            break;
        case Solver::exhaustive:
            se = exhaustive_pattern_select(sample, ctx, opts.exhaustive_cap).achieved_se;
            break;
        case Solver::prhbfnet:
            se = opts.net->infer(sample).achieved_se;
            break;
        }
        rates.push_back(se);
    }
    return summarize(std::move(rates));
}

} // namespace rpabeam
