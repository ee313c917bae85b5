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

#include "rpabeam/pattern_codebook.hpp"

#include <cmath>
#include <string>

namespace rpabeam {

PatternCodebook::PatternCodebook(std::vector<PatternMode> modes) : modes_(std::move(modes))
{
    for (const auto& m : modes_) {
        if (m.peak_azimuths_rad.empty())
            throw ConfigError("pattern mode needs at least one peak azimuth");
        if (m.azimuth_exponent <= 0.0)
            throw ConfigError("pattern azimuth_exponent must be positive");
        if (m.elevation_exponent < 0.0)
            throw ConfigError("pattern elevation_exponent must be non-negative");
        if (m.normalization <= 0.0)
            throw ConfigError("pattern normalization must be positive");
    }
}

PatternCodebook PatternCodebook::default_modes(int num_modes, double azimuth_exponent,
                                               double elevation_exponent)
{
    if (num_modes < 1)
        throw ConfigError("codebook needs at least one mode");

    // Peak azimuths of the four canonical modes; mode 3 is dual-lobe.
    const std::vector<std::vector<double>> canonical = {
        {deg2rad(0.0)}, {deg2rad(30.0)}, {deg2rad(56.0), deg2rad(-56.0)}, {deg2rad(-30.0)}};

    std::vector<PatternMode> modes;
    modes.reserve(num_modes);
    for (int i = 0; i < num_modes; ++i) {
        PatternMode m;
        if (i < static_cast<int>(canonical.size()))
            m.peak_azimuths_rad = canonical[i];
        else
            m.peak_azimuths_rad = {wrap_angle(2.0 * kPi * i / num_modes)};
        m.azimuth_exponent = azimuth_exponent;
        m.elevation_exponent = elevation_exponent;
        modes.push_back(std::move(m));
    }
    PatternCodebook book(std::move(modes));
    book.normalize_equal_power();
    return book;
}

const PatternMode& PatternCodebook::mode(int index) const
{
    if (index < 0 || index >= size())
        throw std::domain_error("pattern mode index " + std::to_string(index) +
                                " out of range [0, " + std::to_string(size()) + ")");
    return modes_[static_cast<std::size_t>(index)];
}

cplx PatternCodebook::gain(int mode_index, double theta, double phi) const
{
    const PatternMode& m = mode(mode_index);
    double best = 0.0;
    for (double peak : m.peak_azimuths_rad) {
        const double dphi = wrap_angle(phi - peak);
        // |dphi| <= pi after wrapping, so cos(dphi/2) >= 0; the lobe falls
        // to zero at the back direction.
        const double lobe = std::pow(std::cos(0.5 * dphi), m.azimuth_exponent);
        if (lobe > best)
            best = lobe;
    }
    double g = m.normalization * best;
    if (m.elevation_exponent > 0.0)
        g *= std::pow(std::sin(theta), m.elevation_exponent);
    if (m.phase_rad == 0.0)
        return cplx(g, 0.0);
    return g * std::exp(cplx(0.0, m.phase_rad));
}

double PatternCodebook::mean_power(int mode_index, int n_theta, int n_phi) const
{
    // Composite midpoint rule of (1/4pi) * integral |G|^2 sin(theta).
    const double dt = kPi / n_theta;
    const double dp = 2.0 * kPi / n_phi;
    double acc = 0.0;
    for (int it = 0; it < n_theta; ++it) {
        const double theta = (it + 0.5) * dt;
        const double st = std::sin(theta);
        double ring = 0.0;
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = -kPi + (ip + 0.5) * dp;
            ring += std::norm(gain(mode_index, theta, phi));
        }
        acc += ring * st;
    }
    return acc * dt * dp / (4.0 * kPi);
}

void PatternCodebook::normalize_equal_power()
{
    for (int i = 0; i < size(); ++i) {
        modes_[static_cast<std::size_t>(i)].normalization = 1.0;
        const double p = mean_power(i);
        if (p <= 0.0)
            throw ConfigError("pattern mode has zero radiated power");
        modes_[static_cast<std::size_t>(i)].normalization = 1.0 / std::sqrt(p);
    }
}

PatternCodebook codebook_from_config(const SystemConfig& cfg)
{
    return PatternCodebook::default_modes(cfg.num_patterns, cfg.pattern_azimuth_exponent,
                                          cfg.pattern_elevation_exponent);
}

} // namespace rpabeam
