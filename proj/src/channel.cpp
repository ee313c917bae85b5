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

#include "rpabeam/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rpabeam {

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const PatternCodebook& book,
                                 const PatternVector& modes, double theta, double phi,
                                 double carrier_freq_hz)
{
    const int nt = geom.num_antennas();
    if (static_cast<int>(modes.size()) != nt)
        throw std::invalid_argument("steering_vector: pattern vector length mismatch");

    const double lambda = kSpeedOfLight / carrier_freq_hz;
    const double st = std::sin(theta);
    const std::array<double, 3> k = {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};

    Eigen::VectorXcd a(nt);
    for (int m = 0; m < nt; ++m) {
        const auto& p = geom.positions[static_cast<std::size_t>(m)];
        const double proj = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
        const cplx phase = std::exp(cplx(0.0, -2.0 * kPi / lambda * proj));
        a(m) = book.gain(modes[static_cast<std::size_t>(m)], theta, phi) * phase;
    }
    return a;
}

PathSet sample_path_set(const SystemConfig& cfg, std::uint64_t seed, int user_index)
{
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(user_index)));
    const auto& pp = cfg.paths;

    PathSet ps;
    ps.rician_k_linear = cfg.rician_k_linear();

    // LoS direction: uniform over the spherical cap of half-angle
    // max_nadir_offset around +z (nadir axis of the downward-facing array).
    const double cos_max = std::cos(deg2rad(pp.max_nadir_offset_deg));
    const double cos_t = cos_max + (1.0 - cos_max) * rng.uniform();
    const double theta0 = std::acos(cos_t);
    const double phi0 = rng.uniform(-kPi, kPi);

    const double slant = cfg.haps_altitude_m / cos_t;
    ps.large_scale_gain = cfg.wavelength_m() / (4.0 * kPi * slant);

    ps.los.theta_rad = theta0;
    ps.los.phi_rad = phi0;
    ps.los.delay_s = slant / kSpeedOfLight;
    ps.los.gain = cplx(1.0, 0.0);

    const int L = cfg.num_nlos_paths;
    ps.nlos.resize(static_cast<std::size_t>(L));
    double total = 0.0;
    for (auto& p : ps.nlos) {
        p.theta_rad = theta0 + deg2rad(rng.uniform(-pp.nlos_elevation_spread_deg,
                                                   pp.nlos_elevation_spread_deg));
        p.theta_rad = std::clamp(p.theta_rad, 0.0, kPi);
        p.phi_rad = wrap_angle(phi0 + deg2rad(rng.uniform(-pp.nlos_azimuth_spread_deg,
                                                          pp.nlos_azimuth_spread_deg)));
        // Excess delay uniform in (0, max]; 1 - u maps [0,1) onto (0,1].
        p.delay_s = ps.los.delay_s + pp.max_excess_delay_s * (1.0 - rng.uniform());
        p.gain = rng.cgauss();
        total += std::norm(p.gain);
    }
    if (L > 0 && total > 0.0) {
        const double scale = 1.0 / std::sqrt(total);
        for (auto& p : ps.nlos)
            p.gain *= scale; // unit total NLoS power per realization
    }
    return ps;
}

EmCsiTensor::EmCsiTensor(int num_subcarriers, int num_users, int num_antennas, int num_modes)
    : nc_(num_subcarriers), k_(num_users), nt_(num_antennas), m_(num_modes)
{
    if (nc_ <= 0 || k_ <= 0 || nt_ <= 0 || m_ <= 0)
        throw std::invalid_argument("EmCsiTensor: all dimensions must be positive");
    data_.assign(static_cast<std::size_t>(nc_) * k_ * nt_ * m_, cplx(0.0, 0.0));
    subcarrier_freqs.resize(static_cast<std::size_t>(nc_));
}

std::vector<double> subcarrier_frequencies(int num_subcarriers, double bandwidth_hz)
{
    if (num_subcarriers <= 0)
        throw std::invalid_argument("subcarrier_frequencies: count must be positive");
    std::vector<double> freqs(static_cast<std::size_t>(num_subcarriers));
    for (int g = 0; g < num_subcarriers; ++g)
        freqs[static_cast<std::size_t>(g)] =
            ((g + 1) - 0.5 * (num_subcarriers + 1)) * bandwidth_hz / num_subcarriers;
    return freqs;
}

EmCsiTensor build_emcsi(const SystemConfig& cfg, const ArrayGeometry& geom,
                        const PatternCodebook& book, const std::vector<PathSet>& paths)
{
    if (static_cast<int>(paths.size()) != cfg.num_users)
        throw ConfigError("build_emcsi: expected one PathSet per user");
    if (geom.num_antennas() != cfg.num_antennas)
        throw ConfigError("build_emcsi: geometry does not match config");
    if (book.size() != cfg.num_patterns)
        throw ConfigError("build_emcsi: codebook size does not match config");

    const int nc = cfg.num_subcarriers;
    const int nt = cfg.num_antennas;
    const int nm = cfg.num_patterns;
    EmCsiTensor tensor(nc, cfg.num_users, nt, nm);
    tensor.subcarrier_freqs = subcarrier_frequencies(nc, cfg.bandwidth_hz);

    // All-mode steering entries per path: rows antennas, cols modes.
    PatternVector all_modes(static_cast<std::size_t>(nt));
    Eigen::MatrixXcd steer(nt, nm);

    for (int u = 0; u < cfg.num_users; ++u) {
        const PathSet& ps = paths[static_cast<std::size_t>(u)];
        const double kr = ps.rician_k_linear;
        const double w_los = std::sqrt(kr / (kr + 1.0));
        const double w_nlos = std::sqrt(1.0 / (kr + 1.0));

        std::vector<Path> all_paths;
        all_paths.reserve(1 + ps.nlos.size());
        all_paths.push_back(ps.los);
        all_paths.insert(all_paths.end(), ps.nlos.begin(), ps.nlos.end());

        for (std::size_t l = 0; l < all_paths.size(); ++l) {
            const Path& path = all_paths[l];
            const double weight = (l == 0) ? w_los : w_nlos;
            for (int mode = 0; mode < nm; ++mode) {
                std::fill(all_modes.begin(), all_modes.end(), mode);
                steer.col(mode) = steering_vector(geom, book, all_modes, path.theta_rad,
                                                  path.phi_rad, cfg.carrier_freq_hz);
            }
            for (int g = 0; g < nc; ++g) {
                const double fg = tensor.subcarrier_freqs[static_cast<std::size_t>(g)];
                const cplx beta = ps.large_scale_gain * path.gain *
                                  std::exp(cplx(0.0, -2.0 * kPi * path.delay_s * fg));
                const cplx w = weight * beta;
                for (int ant = 0; ant < nt; ++ant)
                    for (int mode = 0; mode < nm; ++mode)
                        tensor.at(g, u, ant, mode) += w * steer(ant, mode);
            }
        }
    }
    return tensor;
}

std::vector<Eigen::MatrixXcd> apply_pattern(const EmCsiTensor& emcsi, const PatternVector& c)
{
    const int nt = emcsi.antennas();
    if (static_cast<int>(c.size()) != nt)
        throw std::invalid_argument("apply_pattern: pattern vector length mismatch");
    for (int mode : c)
        if (mode < 0 || mode >= emcsi.modes())
            throw std::domain_error("apply_pattern: mode index out of range");

    std::vector<Eigen::MatrixXcd> channels;
    channels.reserve(static_cast<std::size_t>(emcsi.subcarriers()));
    for (int g = 0; g < emcsi.subcarriers(); ++g) {
        Eigen::MatrixXcd H(emcsi.users(), nt);
        for (int u = 0; u < emcsi.users(); ++u)
            for (int ant = 0; ant < nt; ++ant)
                H(u, ant) = std::conj(emcsi.at(g, u, ant, c[static_cast<std::size_t>(ant)]));
        channels.push_back(std::move(H));
    }
    return channels;
}

EmCsiTensor generate_sample(const SystemConfig& cfg, const ArrayGeometry& geom,
                            const PatternCodebook& book, std::uint64_t sample_seed)
{
    std::vector<PathSet> paths;
    paths.reserve(static_cast<std::size_t>(cfg.num_users));
    for (int u = 0; u < cfg.num_users; ++u)
        paths.push_back(sample_path_set(cfg, sample_seed, u));
    return build_emcsi(cfg, geom, book, paths);
}

} // namespace rpabeam
