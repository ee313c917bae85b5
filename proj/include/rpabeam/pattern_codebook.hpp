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

#include <vector>

#include "rpabeam/common.hpp"
#include "rpabeam/system_config.hpp"

namespace rpabeam {

/// One selectable radiation mode. The gain model is a parametric
/// cosine-power lobe,
///
///   G(theta, phi) = A * max_over_lobes cos^q((phi - phi_peak)/2) * sin^p(theta),
///
/// with the azimuth difference wrapped into (-pi, pi] so the gain tapers to
/// zero at the back of the lobe. Dual-lobe modes list two peak azimuths and
/// take the stronger lobe. `phase_rad` is an optional fixed phase applied to
/// the (otherwise real, non-negative) gain; it defaults to zero.
struct PatternMode {
    std::vector<double> peak_azimuths_rad; // one entry, or two for dual-lobe
    double azimuth_exponent = 4.0;         // q > 0, controls lobe width
    double elevation_exponent = 1.0;       // p >= 0
    double normalization = 1.0;            // A, fixed by normalize_equal_power()
    double phase_rad = 0.0;                // per-mode phase hook, off by default
};

/// Discrete codebook of radiation modes shared by every array element.
/// Modes are indexed 0..size()-1; user-facing pattern numbers are 1-based.
class PatternCodebook {
  public:
    PatternCodebook() = default;
    explicit PatternCodebook(std::vector<PatternMode> modes);

    /// Canonical codebook: peak azimuths 0, +30, {+56,-56} (dual-lobe) and
    /// -30 degrees for the first four modes; additional modes are single
    /// lobes spread uniformly over azimuth. All modes are normalized to
    /// radiate equal total power.
    static PatternCodebook default_modes(int num_modes, double azimuth_exponent = 4.0,
                                         double elevation_exponent = 1.0);

    int size() const { return static_cast<int>(modes_.size()); }
    const PatternMode& mode(int index) const;

    /// Complex gain of one mode in direction (theta, phi). Throws
    /// std::domain_error if the mode index is out of range.
    cplx gain(int mode_index, double theta, double phi) const;

    /// Mean of |G|^2 over the sphere for one mode (midpoint quadrature).
    double mean_power(int mode_index, int n_theta = 400, int n_phi = 800) const;

    /// Rescales every mode so its mean radiated power over the sphere is 1.
    void normalize_equal_power();

  private:
    std::vector<PatternMode> modes_;
};

/// Builds the default codebook sized and shaped per the system configuration.
PatternCodebook codebook_from_config(const SystemConfig& cfg);

} // namespace rpabeam
