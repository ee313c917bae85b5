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

#include "rpabeam/system_config.hpp"

#include <string>

namespace rpabeam {

void PathSamplingParams::validate() const
{
    if (max_nadir_offset_deg <= 0.0 || max_nadir_offset_deg >= 90.0)
        throw ConfigError("paths.max_nadir_offset_deg must be in (0, 90)");
    if (nlos_azimuth_spread_deg < 0.0 || nlos_elevation_spread_deg < 0.0)
        throw ConfigError("paths: NLoS angular spreads must be non-negative");
    if (max_excess_delay_s <= 0.0)
        throw ConfigError("paths.max_excess_delay_s must be positive");
}

void SystemConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigError("system config: " + msg); };

    if (num_antennas <= 0)
        fail("num_antennas must be positive");
    if (num_rf_chains <= 0)
        fail("num_rf_chains must be positive");
    if (num_users <= 0)
        fail("num_users must be positive");
    if (num_subcarriers <= 0)
        fail("num_subcarriers must be positive");
    if (num_patterns < 1)
        fail("num_patterns must be at least 1");
    if (upa_rows <= 0 || upa_cols <= 0)
        fail("upa_rows and upa_cols must be positive");
    if (num_antennas != upa_rows * upa_cols)
        fail("num_antennas must equal upa_rows * upa_cols");
    if (num_antennas % num_rf_chains != 0)
        fail("num_rf_chains must divide num_antennas");
    if (num_users > num_rf_chains)
        fail("num_users must not exceed num_rf_chains");
    if (bandwidth_hz <= 0.0)
        fail("bandwidth_hz must be positive");
    if (carrier_freq_hz <= 0.0)
        fail("carrier_freq_hz must be positive");
    if (element_spacing_wavelengths <= 0.0)
        fail("element_spacing_wavelengths must be positive");
    if (num_nlos_paths < 0)
        fail("num_nlos_paths must be non-negative");
    if (haps_altitude_m <= 0.0)
        fail("haps_altitude_m must be positive");
    paths.validate();
}

SystemConfig SystemConfig::full_scale()
{
    SystemConfig cfg;
    cfg.num_antennas = 32;
    cfg.num_rf_chains = 8;
    cfg.num_users = 4;
    cfg.num_subcarriers = 60;
    cfg.num_patterns = 4;
    cfg.upa_rows = 4;
    cfg.upa_cols = 8;
    return cfg;
}

} // namespace rpabeam
