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

#include "rpabeam/common.hpp"

namespace rpabeam {

/// Distribution parameters for the stochastic path sampler. The shipped
/// defaults target a stratospheric platform serving ground users inside a
/// 60-degree cone around nadir.
struct PathSamplingParams {
    double max_nadir_offset_deg = 60.0;    // LoS service cone half-angle
    double nlos_azimuth_spread_deg = 15.0; // NLoS azimuth offset around LoS
    double nlos_elevation_spread_deg = 5.0;
    double max_excess_delay_s = 1e-6;      // NLoS excess delay upper bound

    void validate() const;
};

/// Full description of one downlink scenario: array, waveform, link budget
/// and channel statistics. Default values are the desk-scale setup used by
/// the test suites; full-scale values live in configs/paper.cfg.
struct SystemConfig {
    int num_antennas = 8;    // Nt, equals upa_rows * upa_cols
    int num_rf_chains = 4;   // each chain drives a contiguous subarray
    int num_users = 2;       // single-antenna users, <= num_rf_chains
    int num_subcarriers = 8; // OFDM grid size
    int num_patterns = 4;    // radiation modes per element
    double bandwidth_hz = 7.2e6;
    double carrier_freq_hz = 2.0e9;
    double noise_density_dbm_per_hz = -174.0;
    double transmit_power_dbm = 30.0;
    int upa_rows = 2;
    int upa_cols = 4;
    double element_spacing_wavelengths = 0.5;
    double rician_k_db = 10.0;
    int num_nlos_paths = 4;
    double haps_altitude_m = 20000.0;
    std::uint64_t rng_seed = 1;
    PathSamplingParams paths;

    // Lobe shape of the default codebook built for this scenario.
    double pattern_azimuth_exponent = 4.0;
    double pattern_elevation_exponent = 1.0;

    int subarray_size() const { return num_antennas / num_rf_chains; }
    double wavelength_m() const { return kSpeedOfLight / carrier_freq_hz; }
    double rician_k_linear() const { return db_to_linear(rician_k_db); }
    double transmit_power_watts() const { return dbm_to_watts(transmit_power_dbm); }
    double element_spacing_m() const { return element_spacing_wavelengths * wavelength_m(); }

    /// Throws ConfigError if any structural invariant is violated.
    void validate() const;

    /// Full-scale setup: 32-element UPA, 8 chains, 60 subcarriers.
    static SystemConfig full_scale();
};

} // namespace rpabeam
