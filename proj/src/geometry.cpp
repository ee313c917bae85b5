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

#include "rpabeam/geometry.hpp"

namespace rpabeam {

ArrayGeometry ArrayGeometry::upa(int rows, int cols, double spacing_m)
{
    if (rows <= 0 || cols <= 0)
        throw ConfigError("UPA dimensions must be positive");
    ArrayGeometry geom;
    geom.positions.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            geom.positions.push_back({c * spacing_m, r * spacing_m, 0.0});
    return geom;
}

} // namespace rpabeam
