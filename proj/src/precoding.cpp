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

#include "rpabeam/precoding.hpp"

#include <cmath>
#include <limits>

namespace rpabeam {

namespace {
constexpr double kModulusTol = 1e-9;
}

SubarrayMapping SubarrayMapping::contiguous(int num_antennas, int num_chains)
{
    if (num_antennas <= 0 || num_chains <= 0)
        throw std::invalid_argument("SubarrayMapping: sizes must be positive");
    if (num_antennas % num_chains != 0)
        throw std::invalid_argument("SubarrayMapping: chains must divide antennas");
    return SubarrayMapping{num_antennas, num_chains};
}

Eigen::MatrixXcd AnalogPrecoder::matrix(const SubarrayMapping& mapping) const
{
    if (static_cast<int>(phases.size()) != mapping.num_antennas)
        throw std::invalid_argument("AnalogPrecoder: phase count does not match mapping");
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(mapping.num_antennas, mapping.num_chains);
    for (int m = 0; m < mapping.num_antennas; ++m)
        F(m, mapping.chain_of(m)) = std::exp(cplx(0.0, phases[static_cast<std::size_t>(m)]));
    return F;
}

double noise_power(double noise_density_dbm_per_hz, double bandwidth_hz, int num_subcarriers)
{
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("noise_power: bandwidth must be positive");
    if (num_subcarriers < 1)
        throw std::invalid_argument("noise_power: need at least one subcarrier");
    const double spacing = bandwidth_hz / num_subcarriers;
    const double dbm = noise_density_dbm_per_hz + 10.0 * std::log10(spacing);
    return dbm_to_watts(dbm);
}

AnalogReport validate_analog(const Eigen::MatrixXcd& F, const SubarrayMapping& mapping)
{
    AnalogReport report;
    if (F.rows() != mapping.num_antennas || F.cols() != mapping.num_chains) {
        report.ok = false;
        report.violations.push_back({-1, -1, 0.0, true});
        return report;
    }
    for (int m = 0; m < mapping.num_antennas; ++m) {
        for (int r = 0; r < mapping.num_chains; ++r) {
            const double mag = std::abs(F(m, r));
            if (r == mapping.chain_of(m)) {
                if (std::abs(mag - 1.0) > kModulusTol)
                    report.violations.push_back({m, r, mag, false});
            } else if (mag != 0.0) {
                report.violations.push_back({m, r, mag, true});
            }
        }
    }
    report.ok = report.violations.empty();
    return report;
}

AnalogReport validate_analog(const AnalogPrecoder& analog, const SubarrayMapping& mapping)
{
    return validate_analog(analog.matrix(mapping), mapping);
}

DigitalPrecoderSet normalize_power(const DigitalPrecoderSet& digital,
                                   const AnalogPrecoder& analog, const SubarrayMapping& mapping,
                                   double pt_watts)
{
    if (digital.empty())
        throw std::invalid_argument("normalize_power: empty digital precoder set");
    if (pt_watts <= 0.0)
        throw std::invalid_argument("normalize_power: power budget must be positive");

    const Eigen::MatrixXcd F = analog.matrix(mapping);
    double total = 0.0;
    for (const auto& Fbb : digital)
        total += (F * Fbb).squaredNorm();
    if (total <= 0.0)
        throw std::invalid_argument("normalize_power: all-zero digital precoders");

    const double scale = std::sqrt(pt_watts * static_cast<double>(digital.size()) / total);
    DigitalPrecoderSet out = digital;
    for (auto& Fbb : out)
        Fbb *= scale;
    return out;
}

namespace detail {

double sinr_unchecked(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& F,
                      const Eigen::MatrixXcd& Fbb, double sigma2, int user)
{
    // Rows of H are h^H, so the effective gain toward user u from stream k
    // is (H F Fbb)(u, k).
    const Eigen::RowVectorXcd row = H.row(user) * F;
    const Eigen::RowVectorXcd gains = row * Fbb;
    const double signal = std::norm(gains(user));
    double interference = 0.0;
    for (int k = 0; k < gains.size(); ++k)
        if (k != user)
            interference += std::norm(gains(k));
    const double denom = interference + sigma2;
    if (denom <= 0.0)
        return signal > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return signal / denom;
}

} // namespace detail

double sinr(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& F, const Eigen::MatrixXcd& Fbb,
            double sigma2, int user)
{
    if (sigma2 <= 0.0)
        throw std::domain_error("sinr: noise power must be positive");
    if (user < 0 || user >= H.rows())
        throw std::invalid_argument("sinr: user index out of range");
    return detail::sinr_unchecked(H, F, Fbb, sigma2, user);
}

double sum_se(const std::vector<Eigen::MatrixXcd>& channels, const Eigen::MatrixXcd& F,
              const DigitalPrecoderSet& digital, double sigma2)
{
    if (channels.size() != digital.size())
        throw std::invalid_argument("sum_se: channel/digital subcarrier count mismatch");
    if (channels.empty())
        throw std::invalid_argument("sum_se: empty channel set");
    if (sigma2 <= 0.0)
        throw std::domain_error("sum_se: noise power must be positive");

    double acc = 0.0;
    for (std::size_t g = 0; g < channels.size(); ++g) {
        const int users = static_cast<int>(channels[g].rows());
        for (int u = 0; u < users; ++u)
            acc += std::log2(1.0 + detail::sinr_unchecked(channels[g], F, digital[g], sigma2, u));
    }
    return acc / static_cast<double>(channels.size());
}

} // namespace rpabeam
