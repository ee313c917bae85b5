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
#include <vector>

#include "rpabeam/precoding.hpp"

namespace rpabeam {

struct GreedyConfig {
    int max_sweeps = 2;
    double improvement_tol = 1e-6; // bits/s/Hz; sweeps stop below this gain
};

/// Everything the classical solvers need besides the channel itself.
struct HbfContext {
    SubarrayMapping mapping;
    double sigma2 = 0.0;   // per-subcarrier noise power, watts
    double pt_watts = 0.0; // average transmit power budget

    static HbfContext from_config(const SystemConfig& cfg);
};

/// Phase-only analog initialization: per RF chain, the element-wise
/// arguments of the dominant eigenvector of the subcarrier-summed subarray
/// Gram matrix. Chains whose subarray channel is numerically zero get zero
/// phases; their indices are reported through `degenerate_chains` when a
/// destination is supplied.
AnalogPrecoder svd_analog_init(const std::vector<Eigen::MatrixXcd>& channels,
                               const SubarrayMapping& mapping,
                               std::vector<int>* degenerate_chains = nullptr);

/// Regularized zero-forcing on each effective channel E_g = H_g F_RF, with
/// regularizer K sigma2 / Pt, columns rescaled to equal norm. Output is
/// unnormalized; callers apply normalize_power.
DigitalPrecoderSet svd_digital_init(const std::vector<Eigen::MatrixXcd>& effective,
                                    double sigma2, double pt_watts);

/// Deterministic anchor pipeline: analog init, digital init, joint power
/// rescaling, then SE evaluation. `c` is carried into the returned solution
/// unchanged (the pattern was chosen by the caller).
BeamformingSolution hbf_solve(const std::vector<Eigen::MatrixXcd>& channels,
                              const HbfContext& ctx, PatternVector c = {});

/// Coordinate-wise pattern search: start from mode 0 everywhere, sweep
/// antennas in ascending order trying every mode, keep the best (ties to
/// the lowest mode). Stops after max_sweeps or when a full sweep improves
/// by less than the tolerance. `se_trace`, when supplied, records the SE of
/// every accepted configuration.
BeamformingSolution greedy_pattern_select(const EmCsiTensor& emcsi, const GreedyConfig& gcfg,
                                          const HbfContext& ctx,
                                          std::vector<double>* se_trace = nullptr);

/// Brute force over all M^Nt pattern vectors; refuses when the count
/// exceeds `cap`. Ties break to the lexicographically smallest c.
BeamformingSolution exhaustive_pattern_select(const EmCsiTensor& emcsi, const HbfContext& ctx,
                                              std::uint64_t cap = 4096);

/// All antennas on one fixed mode.
BeamformingSolution fixed_pattern(const EmCsiTensor& emcsi, const HbfContext& ctx, int mode);

/// Seeded uniform per-antenna mode draw.
BeamformingSolution random_pattern(const EmCsiTensor& emcsi, const HbfContext& ctx,
                                   std::uint64_t seed);

} // namespace rpabeam
