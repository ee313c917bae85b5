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

#include <array>
#include <vector>

#include "rpabeam/system_config.hpp"

namespace rpabeam {

/// Physical element positions in meters. The UPA lies in the xy-plane with
/// the first element at the origin and +z pointing from the platform toward
/// the ground (theta = 0 is boresight/nadir).
struct ArrayGeometry {
    std::vector<std::array<double, 3>> positions;

    int num_antennas() const { return static_cast<int>(positions.size()); }

    /// Row-major UPA: element m = row * cols + col sits at
    /// (col * spacing, row * spacing, 0).
    static ArrayGeometry upa(int rows, int cols, double spacing_m);

    static ArrayGeometry from_config(const SystemConfig& cfg)
    {
        return upa(cfg.upa_rows, cfg.upa_cols, cfg.element_spacing_m());
    }
};

} // namespace rpabeam
