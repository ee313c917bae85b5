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
#include <cstdint>
#include <vector>

#include "rpabeam/geometry.hpp"
#include "rpabeam/pattern_codebook.hpp"
#include "rpabeam/rng.hpp"
#include "rpabeam/system_config.hpp"

namespace rpabeam {

/// Per-antenna radiation mode selection, 0-based into the codebook.
using PatternVector = std::vector<int>;

/// One propagation path: arrival direction at the array, small-scale
/// complex gain and absolute delay.
struct Path {
    double theta_rad = 0.0;
    double phi_rad = 0.0;
    cplx gain;
    double delay_s = 0.0;
};

/// Geometry realization for one user: LoS path, NLoS cluster, Rician factor
/// and the free-space large-scale amplitude at the slant distance.
struct PathSet {
    Path los;
    std::vector<Path> nlos;
    double rician_k_linear = 1.0;
    double large_scale_gain = 1.0; // linear amplitude
};

/// Centered baseband subcarrier offsets f_g = (g - (Nc+1)/2) Bw/Nc for
/// 1-based subcarrier index g.
std::vector<double> subcarrier_frequencies(int num_subcarriers, double bandwidth_hz);

/// Array response in direction (theta, phi) with per-element pattern gains:
/// element m is G_{c_m}(theta, phi) * exp(-j 2pi/lambda k.p_m) with unit
/// wave vector k = [sin t cos p, sin t sin p, cos t].
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const PatternCodebook& book,
                                 const PatternVector& modes, double theta, double phi,
                                 double carrier_freq_hz);

/// Draws one user's path realization from the seeded stream
/// derive_seed(seed, user_index); repeated calls are identical.
PathSet sample_path_set(const SystemConfig& cfg, std::uint64_t seed, int user_index);

/// Channel coefficients for every (subcarrier, user, antenna, candidate
/// mode). Entries are the h coefficients themselves; apply_pattern performs
/// the Hermitian row stacking used by the precoding layer.
class EmCsiTensor {
  public:
    EmCsiTensor() = default;
    EmCsiTensor(int num_subcarriers, int num_users, int num_antennas, int num_modes);

    int subcarriers() const { return nc_; }
    int users() const { return k_; }
    int antennas() const { return nt_; }
    int modes() const { return m_; }

    cplx& at(int g, int u, int antenna, int mode)
    {
        return data_[index(g, u, antenna, mode)];
    }
    const cplx& at(int g, int u, int antenna, int mode) const
    {
        return data_[index(g, u, antenna, mode)];
    }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    /// Centered baseband subcarrier offsets f_g = (g - (Nc+1)/2) Bw/Nc for
    /// 1-based g.
    std::vector<double> subcarrier_freqs;

  private:
    std::size_t index(int g, int u, int antenna, int mode) const
    {
        return ((static_cast<std::size_t>(g) * k_ + u) * nt_ + antenna) * m_ + mode;
    }

    int nc_ = 0, k_ = 0, nt_ = 0, m_ = 0;
    std::vector<cplx> data_;
};

/// Evaluates the Rician multipath superposition on every subcarrier for all
/// candidate modes at once.
EmCsiTensor build_emcsi(const SystemConfig& cfg, const ArrayGeometry& geom,
                        const PatternCodebook& book, const std::vector<PathSet>& paths);

/// Selects each antenna's active-mode coefficient and stacks users as rows
/// of h^H: [H_g]_{u,m} = conj(emcsi[g, u, m, c_m]).
std::vector<Eigen::MatrixXcd> apply_pattern(const EmCsiTensor& emcsi, const PatternVector& c);

/// Convenience: sample K path sets and build the tensor, all derived from
/// one seed.
EmCsiTensor generate_sample(const SystemConfig& cfg, const ArrayGeometry& geom,
                            const PatternCodebook& book, std::uint64_t sample_seed);

} // namespace rpabeam
