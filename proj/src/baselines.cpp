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

#include "rpabeam/baselines.hpp"

#include <cmath>
#include <string>

namespace rpabeam {

HbfContext HbfContext::from_config(const SystemConfig& cfg)
{
    HbfContext ctx;
    ctx.mapping = SubarrayMapping::contiguous(cfg.num_antennas, cfg.num_rf_chains);
    ctx.sigma2 =
        noise_power(cfg.noise_density_dbm_per_hz, cfg.bandwidth_hz, cfg.num_subcarriers);
    ctx.pt_watts = cfg.transmit_power_watts();
    return ctx;
}

AnalogPrecoder svd_analog_init(const std::vector<Eigen::MatrixXcd>& channels,
                               const SubarrayMapping& mapping,
                               std::vector<int>* degenerate_chains)
{
    if (channels.empty())
        throw std::invalid_argument("svd_analog_init: empty channel set");

    const int ns = mapping.subarray_size();
    AnalogPrecoder analog;
    analog.phases.assign(static_cast<std::size_t>(mapping.num_antennas), 0.0);
    if (degenerate_chains)
        degenerate_chains->clear();

    for (int r = 0; r < mapping.num_chains; ++r) {
        const int col0 = mapping.first_antenna(r);
        Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(ns, ns);
        for (const auto& H : channels) {
            const auto block = H.middleCols(col0, ns);
            gram += block.adjoint() * block;
        }
        if (gram.norm() < 1e-300) {
            if (degenerate_chains)
                degenerate_chains->push_back(r);
            continue; // phases stay zero
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
        const Eigen::VectorXcd v = eig.eigenvectors().col(ns - 1); // largest eigenvalue
        for (int i = 0; i < ns; ++i)
            analog.phases[static_cast<std::size_t>(col0 + i)] = std::arg(v(i));
    }
    return analog;
}

DigitalPrecoderSet svd_digital_init(const std::vector<Eigen::MatrixXcd>& effective,
                                    double sigma2, double pt_watts)
{
    if (effective.empty())
        throw std::invalid_argument("svd_digital_init: empty effective channel set");
    if (pt_watts <= 0.0)
        throw std::invalid_argument("svd_digital_init: power budget must be positive");

    DigitalPrecoderSet digital;
    digital.reserve(effective.size());
    for (const auto& E : effective) {
        const int users = static_cast<int>(E.rows());
        const double reg = users * sigma2 / pt_watts;
        const Eigen::MatrixXcd gram =
            E * E.adjoint() + reg * Eigen::MatrixXcd::Identity(users, users);
        Eigen::MatrixXcd Fbb = E.adjoint() * gram.ldlt().solve(
                                                 Eigen::MatrixXcd::Identity(users, users));
        // Equal per-user column norms; zero-channel users keep zero columns.
        for (int u = 0; u < users; ++u) {
            const double n = Fbb.col(u).norm();
            if (n > 0.0)
                Fbb.col(u) /= n;
        }
        digital.push_back(std::move(Fbb));
    }
    return digital;
}

BeamformingSolution hbf_solve(const std::vector<Eigen::MatrixXcd>& channels,
                              const HbfContext& ctx, PatternVector c)
{
    BeamformingSolution sol;
    sol.c = std::move(c);
    sol.analog = svd_analog_init(channels, ctx.mapping);
    const Eigen::MatrixXcd F = sol.analog.matrix(ctx.mapping);

    std::vector<Eigen::MatrixXcd> effective;
    effective.reserve(channels.size());
    for (const auto& H : channels)
        effective.push_back(H * F);

    const DigitalPrecoderSet raw = svd_digital_init(effective, ctx.sigma2, ctx.pt_watts);
    sol.digital = normalize_power(raw, sol.analog, ctx.mapping, ctx.pt_watts);
    sol.achieved_se = sum_se(channels, F, sol.digital, ctx.sigma2);
    return sol;
}

namespace {

BeamformingSolution solve_for_pattern(const EmCsiTensor& emcsi, const HbfContext& ctx,
                                      const PatternVector& c)
{
    return hbf_solve(apply_pattern(emcsi, c), ctx, c);
}

} // namespace

BeamformingSolution greedy_pattern_select(const EmCsiTensor& emcsi, const GreedyConfig& gcfg,
                                          const HbfContext& ctx, std::vector<double>* se_trace)
{
    if (gcfg.max_sweeps < 1)
        throw std::invalid_argument("greedy_pattern_select: max_sweeps must be >= 1");
    if (gcfg.improvement_tol <= 0.0)
        throw std::invalid_argument("greedy_pattern_select: improvement_tol must be positive");

    const int nt = emcsi.antennas();
    const int nm = emcsi.modes();
    PatternVector c(static_cast<std::size_t>(nt), 0);
    BeamformingSolution best = solve_for_pattern(emcsi, ctx, c);
    if (se_trace) {
        se_trace->clear();
        se_trace->push_back(best.achieved_se);
    }

    for (int sweep = 0; sweep < gcfg.max_sweeps; ++sweep) {
        const double sweep_start_se = best.achieved_se;
        for (int ant = 0; ant < nt; ++ant) {
            int best_mode = c[static_cast<std::size_t>(ant)];
            BeamformingSolution best_cand = best;
            for (int mode = 0; mode < nm; ++mode) {
                if (mode == c[static_cast<std::size_t>(ant)])
                    continue; // current mode already evaluated
                PatternVector cand = c;
                cand[static_cast<std::size_t>(ant)] = mode;
                BeamformingSolution sol = solve_for_pattern(emcsi, ctx, cand);
                // Strict improvement keeps the lowest mode index on ties.
                const bool better =
                    sol.achieved_se > best_cand.achieved_se ||
                    (sol.achieved_se == best_cand.achieved_se && mode < best_mode);
                if (better) {
                    best_cand = std::move(sol);
                    best_mode = mode;
                }
            }
            if (best_mode != c[static_cast<std::size_t>(ant)]) {
                c[static_cast<std::size_t>(ant)] = best_mode;
                best = std::move(best_cand);
            }
            if (se_trace)
                se_trace->push_back(best.achieved_se);
        }
        if (best.achieved_se - sweep_start_se < gcfg.improvement_tol)
            break;
    }
    return best;
}

BeamformingSolution exhaustive_pattern_select(const EmCsiTensor& emcsi, const HbfContext& ctx,
                                              std::uint64_t cap)
{
    const int nt = emcsi.antennas();
    const int nm = emcsi.modes();

    std::uint64_t count = 1;
    bool exceeds = false;
    for (int i = 0; i < nt; ++i) {
        if (count > cap / static_cast<std::uint64_t>(nm)) {
            exceeds = true;
            break;
        }
        count *= static_cast<std::uint64_t>(nm);
    }
    if (exceeds || count > cap)
        throw std::invalid_argument("exhaustive_pattern_select: search space " +
                                    std::to_string(nm) + "^" + std::to_string(nt) +
                                    " exceeds cap " + std::to_string(cap));

    PatternVector c(static_cast<std::size_t>(nt), 0);
    BeamformingSolution best = solve_for_pattern(emcsi, ctx, c);
    // Lexicographic enumeration: strict improvement keeps the smallest c.
    while (true) {
        int pos = nt - 1;
        while (pos >= 0 && c[static_cast<std::size_t>(pos)] == nm - 1) {
            c[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0)
            break;
        ++c[static_cast<std::size_t>(pos)];
        BeamformingSolution sol = solve_for_pattern(emcsi, ctx, c);
        if (sol.achieved_se > best.achieved_se)
            best = std::move(sol);
    }
    return best;
}

BeamformingSolution fixed_pattern(const EmCsiTensor& emcsi, const HbfContext& ctx, int mode)
{
    if (mode < 0 || mode >= emcsi.modes())
        throw std::domain_error("fixed_pattern: mode index out of range");
    PatternVector c(static_cast<std::size_t>(emcsi.antennas()), mode);
    return solve_for_pattern(emcsi, ctx, c);
}

BeamformingSolution random_pattern(const EmCsiTensor& emcsi, const HbfContext& ctx,
                                   std::uint64_t seed)
{
    Rng rng(seed);
    PatternVector c(static_cast<std::size_t>(emcsi.antennas()));
    for (auto& mode : c)
        mode = static_cast<int>(rng.integer(static_cast<std::uint64_t>(emcsi.modes())));
    return solve_for_pattern(emcsi, ctx, c);
}

} // namespace rpabeam
