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

#include <Eigen/Dense>
#include <vector>

#include "rpabeam/channel.hpp"

namespace rpabeam {

/// Assignment of antennas to RF chains. Antenna m belongs to chain
/// floor(m / subarray_size): contiguous disjoint blocks.
struct SubarrayMapping {
    int num_antennas = 0;
    int num_chains = 0;

    static SubarrayMapping contiguous(int num_antennas, int num_chains);

    int subarray_size() const { return num_antennas / num_chains; }
    int chain_of(int antenna) const { return antenna / subarray_size(); }
    int first_antenna(int chain) const { return chain * subarray_size(); }
};

/// Phase-shifter network of the sub-connected architecture. Only the phases
/// are free; the implied matrix F_RF is block diagonal with unit-modulus
/// non-zero entries and is shared across subcarriers.
struct AnalogPrecoder {
    std::vector<double> phases; // one per antenna, radians

    /// Materializes F_RF (num_antennas x num_chains).
    Eigen::MatrixXcd matrix(const SubarrayMapping& mapping) const;
};

/// Per-subcarrier baseband precoders, each num_chains x num_users.
using DigitalPrecoderSet = std::vector<Eigen::MatrixXcd>;

/// Joint solution bundle: pattern selection, both precoders and the sum
/// spectral efficiency they achieve.
struct BeamformingSolution {
    PatternVector c;
    AnalogPrecoder analog;
    DigitalPrecoderSet digital;
    double achieved_se = 0.0; // bits/s/Hz
};

/// Per-subcarrier noise power in watts for a given density (dBm/Hz) and
/// subcarrier spacing bandwidth_hz / num_subcarriers.
double noise_power(double noise_density_dbm_per_hz, double bandwidth_hz, int num_subcarriers);

struct AnalogViolation {
    int row = 0;
    int col = 0;
    double magnitude = 0.0;
    bool outside_support = false;
};

struct AnalogReport {
    bool ok = true;
    std::vector<AnalogViolation> violations;
};

/// Checks block-diagonal support and unit modulus (tolerance 1e-9) of an
/// explicit analog matrix against the mapping.
AnalogReport validate_analog(const Eigen::MatrixXcd& analog_matrix,
                             const SubarrayMapping& mapping);
AnalogReport validate_analog(const AnalogPrecoder& analog, const SubarrayMapping& mapping);

/// Rescales all digital precoders by one scalar so that
/// (1/Nc) sum_g ||F_RF F_BB,g||_F^2 equals pt_watts exactly. Throws
/// std::invalid_argument on an all-zero digital set.
DigitalPrecoderSet normalize_power(const DigitalPrecoderSet& digital,
                                   const AnalogPrecoder& analog, const SubarrayMapping& mapping,
                                   double pt_watts);

/// SINR of user u on one subcarrier; rows of H are h^H. Rejects sigma2 <= 0.
double sinr(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& analog_matrix,
            const Eigen::MatrixXcd& digital, double sigma2, int user);

/// Average over subcarriers of the per-user log2(1+SINR) sum.
double sum_se(const std::vector<Eigen::MatrixXcd>& channels,
              const Eigen::MatrixXcd& analog_matrix, const DigitalPrecoderSet& digital,
              double sigma2);

namespace detail {

/// sinr without the sigma2 > 0 gate; used by invariance tests that probe
/// the noiseless limit.
double sinr_unchecked(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& analog_matrix,
                      const Eigen::MatrixXcd& digital, double sigma2, int user);

} // namespace detail

} // namespace rpabeam
