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

#include "rpabeam/prhbfnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpabeam/config_file.hpp"

namespace rpabeam {
namespace {

/// Complex matrices in the graph are carried as (real, imag) pairs.
struct CxPair {
    ad::Tensor re, im;
};

CxPair cmatmul(const CxPair& a, const CxPair& b)
{
    return {ad::sub(ad::matmul(a.re, b.re), ad::matmul(a.im, b.im)),
            ad::add(ad::matmul(a.re, b.im), ad::matmul(a.im, b.re))};
}

/// Root-mean-square magnitude over the whole tensor; used to bring the
/// raw channel entries (free-space scale, around 1e-6) to unit order for
/// the encoder inputs. The rate expression itself is never rescaled.
double tensor_rms(const EmCsiTensor& t)
{
    double acc = 0.0;
    for (const cplx& v : t.data())
        acc += std::norm(v);
    const double mean = acc / static_cast<double>(t.data().size());
    return mean > 0.0 ? std::sqrt(mean) : 1.0;
}

Eigen::MatrixXd one_hot_rows(const PatternVector& selection, int num_modes)
{
    Eigen::MatrixXd w =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(selection.size()), num_modes);
    for (std::size_t i = 0; i < selection.size(); ++i)
        w(static_cast<Eigen::Index>(i), selection[i]) = 1.0;
    return w;
}

} // namespace

std::vector<int> pilot_indices(int num_subcarriers, int requested)
{
    if (num_subcarriers <= 0)
        throw std::invalid_argument("pilot_indices: subcarrier count must be positive");
    const int req = std::clamp(requested, 1, num_subcarriers);
    int count = 1;
    for (int cand = req; cand >= 1; --cand)
        if (num_subcarriers % cand == 0) {
            count = cand;
            break;
        }
    const int stride = num_subcarriers / count;
    std::vector<int> idx(static_cast<std::size_t>(count));
    for (int p = 0; p < count; ++p)
        idx[static_cast<std::size_t>(p)] = p * stride;
    return idx;
}

void PrHbfNetConfig::validate() const
{
    if (depth <= 0 || d_model <= 0 || num_heads <= 0 || d_ff <= 0)
        throw std::invalid_argument("net config: encoder dimensions must be positive");
    if (d_model % num_heads != 0)
        throw std::invalid_argument("net config: d_model must be divisible by num_heads");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("net config: dropout must lie in [0, 1)");
    if (pilot_subcarriers < 1)
        throw std::invalid_argument("net config: pilot_subcarriers must be at least 1");
    if (!(ste_temperature > 0.0))
        throw std::invalid_argument("net config: ste_temperature must be positive");
}

PrHbfNet::PrHbfNet(const SystemConfig& sys, const PrHbfNetConfig& cfg, std::uint64_t init_seed)
    : sys_(sys), cfg_(cfg)
{
    sys_.validate();
    cfg_.validate();
    pilot_idx_ = pilot_indices(sys_.num_subcarriers, cfg_.pilot_subcarriers);
    mapping_ = SubarrayMapping::contiguous(sys_.num_antennas, sys_.num_rf_chains);
    sigma2_ = noise_power(sys_.noise_density_dbm_per_hz, sys_.bandwidth_hz,
                          sys_.num_subcarriers);
    pt_watts_ = sys_.transmit_power_watts();

    const int nt = sys_.num_antennas;
    const int nrf = sys_.num_rf_chains;
    const int k = sys_.num_users;
    const int nm = sys_.num_patterns;
    const int nc = sys_.num_subcarriers;
    const int p = static_cast<int>(pilot_idx_.size());

    chain_mask_ = Eigen::MatrixXd::Zero(nt, nrf);
    for (int m = 0; m < nt; ++m)
        chain_mask_(m, mapping_.chain_of(m)) = 1.0;

    Rng init_rng(init_seed);
    auto shaped = [&](int input_dim, int max_tokens) {
        nn::TransformerEncoderConfig e;
        e.input_dim = input_dim;
        e.max_tokens = max_tokens;
        e.depth = cfg_.depth;
        e.d_model = cfg_.d_model;
        e.num_heads = cfg_.num_heads;
        e.d_ff = cfg_.d_ff;
        e.dropout = cfg_.dropout;
        return e;
    };

    pattern_enc_ = std::make_unique<nn::TransformerEncoder>(shaped(2 * k * nm * p, nt), "prn",
                                                            store_, init_rng);
    // The selection head starts random, not zero: zero logits tie every
    // argmax to mode 0, so the scorer would never observe alternative
    // selections during training and collapses onto a single sample
    // independent mode. The refinement heads below start at zero so the
    // whole net reproduces the classical pipeline at initialization.
    pattern_head_w_ =
        store_.add("prn.head.w", nn::glorot_uniform(cfg_.d_model, nm, init_rng));
    pattern_head_b_ = store_.add("prn.head.b", Eigen::MatrixXd::Zero(1, nm));

    const int ns = mapping_.subarray_size();
    analog_enc_ = std::make_unique<nn::TransformerEncoder>(shaped(2 * ns * k * p, nrf),
                                                           "analog", store_, init_rng);
    analog_head_w_ = store_.add("analog.head.w", Eigen::MatrixXd::Zero(cfg_.d_model, ns));
    analog_head_b_ = store_.add("analog.head.b", Eigen::MatrixXd::Zero(1, ns));

    digital_enc_ = std::make_unique<nn::TransformerEncoder>(shaped(2 * k * nrf, nc), "digital",
                                                            store_, init_rng);
    digital_head_w_ =
        store_.add("digital.head.w", Eigen::MatrixXd::Zero(cfg_.d_model, 2 * nrf * k));
    digital_head_b_ = store_.add("digital.head.b", Eigen::MatrixXd::Zero(1, 2 * nrf * k));
}

ad::Tensor PrHbfNet::selection_weights(const EmCsiTensor& emcsi, double feature_scale,
                                       bool relaxed, PatternVector& hard,
                                       Rng* dropout_rng) const
{
    const int nt = sys_.num_antennas;
    const int k = sys_.num_users;
    const int nm = sys_.num_patterns;
    const int p = static_cast<int>(pilot_idx_.size());

    Eigen::MatrixXd tokens(nt, 2 * k * nm * p);
    for (int ant = 0; ant < nt; ++ant) {
        Eigen::Index col = 0;
        for (int u = 0; u < k; ++u)
            for (int m = 0; m < nm; ++m)
                for (int pi = 0; pi < p; ++pi) {
                    const cplx z = emcsi.at(pilot_idx_[static_cast<std::size_t>(pi)], u, ant, m);
                    tokens(ant, col++) = z.real() * feature_scale;
                    tokens(ant, col++) = z.imag() * feature_scale;
                }
    }

    ad::Tensor h = pattern_enc_->forward(ad::constant(std::move(tokens)), dropout_rng);
    ad::Tensor logits = ad::add_rowvec(ad::matmul(h, pattern_head_w_), pattern_head_b_);
    if (dropout_rng && selection_noise > 0.0) {
        Eigen::MatrixXd noise(nt, nm);
        for (Eigen::Index i = 0; i < noise.rows(); ++i)
            for (Eigen::Index j = 0; j < noise.cols(); ++j)
                noise(i, j) = selection_noise * dropout_rng->normal();
        logits = ad::add(logits, ad::constant(std::move(noise)));
    }
    hard = ad::argmax_rows(logits->value);
    return ad::ste_argmax_rows(logits, cfg_.ste_temperature, relaxed);
}

ad::Tensor PrHbfNet::analog_phases(const std::vector<Eigen::MatrixXcd>& channels,
                                   const Eigen::VectorXd& theta0, double feature_scale,
                                   Rng* dropout_rng) const
{
    const int nt = sys_.num_antennas;
    const int nrf = sys_.num_rf_chains;
    const int ns = mapping_.subarray_size();
    const int k = sys_.num_users;
    const int p = static_cast<int>(pilot_idx_.size());

    // One token per RF chain: the complex subarray channel at the pilot
    // subcarriers. The head emits one residual phase per subarray element,
    // so the row-major reshape below lands on global antenna order.
    Eigen::MatrixXd tokens(nrf, 2 * ns * k * p);
    for (int r = 0; r < nrf; ++r) {
        Eigen::Index col = 0;
        for (int s = 0; s < ns; ++s) {
            const int ant = mapping_.first_antenna(r) + s;
            for (int u = 0; u < k; ++u)
                for (int pi = 0; pi < p; ++pi) {
                    const cplx z = channels[static_cast<std::size_t>(
                        pilot_idx_[static_cast<std::size_t>(pi)])](u, ant);
                    tokens(r, col++) = z.real() * feature_scale;
                    tokens(r, col++) = z.imag() * feature_scale;
                }
        }
    }

    ad::Tensor h = analog_enc_->forward(ad::constant(std::move(tokens)), dropout_rng);
    ad::Tensor delta = ad::add_rowvec(ad::matmul(h, analog_head_w_), analog_head_b_);
    return ad::add(ad::constant(theta0), ad::reshape(delta, nt, 1));
}

ad::Tensor PrHbfNet::digital_residual(const std::vector<Eigen::MatrixXcd>& effective,
                                      double feature_scale, Rng* dropout_rng) const
{
    const int k = sys_.num_users;
    const int nrf = sys_.num_rf_chains;
    const int nc = sys_.num_subcarriers;

    // One token per subcarrier: the flattened complex effective channel.
    // Row g of the head output holds that subcarrier's residual, first the
    // real block then the imaginary block, each in (chain, user) row-major
    // order.
    Eigen::MatrixXd tokens(nc, 2 * k * nrf);
    for (int g = 0; g < nc; ++g) {
        Eigen::Index col = 0;
        for (int u = 0; u < k; ++u)
            for (int r = 0; r < nrf; ++r) {
                const cplx z = effective[static_cast<std::size_t>(g)](u, r);
                tokens(g, col++) = z.real() * feature_scale;
                tokens(g, col++) = z.imag() * feature_scale;
            }
    }

    ad::Tensor h = digital_enc_->forward(ad::constant(std::move(tokens)), dropout_rng);
    return ad::add_rowvec(ad::matmul(h, digital_head_w_), digital_head_b_);
}

PrHbfNet::Forward PrHbfNet::sample_loss(const EmCsiTensor& emcsi, bool relaxed_selection,
                                        Rng* dropout_rng) const
{
    if (emcsi.subcarriers() != sys_.num_subcarriers || emcsi.users() != sys_.num_users ||
        emcsi.antennas() != sys_.num_antennas || emcsi.modes() != sys_.num_patterns)
        throw ConfigError("sample dimensions do not match the model's system config");

    const int nt = sys_.num_antennas;
    const int nrf = sys_.num_rf_chains;
    const int k = sys_.num_users;
    const int nm = sys_.num_patterns;
    const int nc = sys_.num_subcarriers;
    const double feature_scale = 1.0 / tensor_rms(emcsi);

    // Stage 1: per-antenna mode scores -> one-hot selection weights. The
    // hard selection drives the closed-form baselines; the weights feed the
    // in-graph channel gather so selection gradients reach the scorer.
    PatternVector hard;
    ad::Tensor weights;
    if (force_mode >= 0) {
        if (force_mode >= nm)
            throw std::domain_error("forced mode " + std::to_string(force_mode) +
                                    " outside codebook of " + std::to_string(nm) + " modes");
        hard.assign(static_cast<std::size_t>(nt), force_mode);
        weights = ad::constant(one_hot_rows(hard, nm));
    } else {
        weights = selection_weights(emcsi, feature_scale, relaxed_selection, hard, dropout_rng);
    }

    const std::vector<Eigen::MatrixXcd> channels = apply_pattern(emcsi, hard);

    // Stage 2: analog phases as a residual on the subarray eigen-phase
    // baseline, materialized as a block-diagonal unit-modulus matrix.
    const AnalogPrecoder base = svd_analog_init(channels, mapping_);
    const Eigen::VectorXd theta0 =
        Eigen::Map<const Eigen::VectorXd>(base.phases.data(), nt);
    ad::Tensor theta = analog_phases(channels, theta0, feature_scale, dropout_rng);
    ad::Tensor mask = ad::constant(chain_mask_);
    CxPair f_rf{ad::scale_rows(mask, ad::cos(theta)), ad::scale_rows(mask, ad::sin(theta))};

    // Stage 3: digital residual on the regularized zero-forcing baseline.
    // The baseline is computed from the classical phases so it is constant
    // with respect to every parameter; at zero residual it coincides with
    // the classical pipeline.
    Eigen::MatrixXcd f_rf_num(nt, nrf);
    f_rf_num.setZero();
    for (int m = 0; m < nt; ++m)
        f_rf_num(m, mapping_.chain_of(m)) = std::exp(cplx(0.0, theta0(m)));
    std::vector<Eigen::MatrixXcd> effective_num(static_cast<std::size_t>(nc));
    for (int g = 0; g < nc; ++g)
        effective_num[static_cast<std::size_t>(g)] =
            channels[static_cast<std::size_t>(g)] * f_rf_num;
    const DigitalPrecoderSet f0 = svd_digital_init(effective_num, sigma2_, pt_watts_);
    ad::Tensor residual = digital_residual(effective_num, feature_scale, dropout_rng);

    // Assemble per-subcarrier products and the shared power normalizer
    // sqrt(Pt Nc / sum_g ||F_RF F_BB,g||_F^2).
    std::vector<CxPair> eff(static_cast<std::size_t>(nc));
    std::vector<CxPair> fbb(static_cast<std::size_t>(nc));
    ad::Tensor power_total;
    for (int g = 0; g < nc; ++g) {
        Eigen::MatrixXd block_re(k * nt, nm), block_im(k * nt, nm);
        for (int u = 0; u < k; ++u)
            for (int ant = 0; ant < nt; ++ant)
                for (int m = 0; m < nm; ++m) {
                    const cplx z = emcsi.at(g, u, ant, m);
                    block_re(u * nt + ant, m) = z.real();
                    block_im(u * nt + ant, m) = -z.imag(); // rows carry h^H
                }
        CxPair h_g{ad::mode_gather(ad::constant(std::move(block_re)), weights),
                   ad::mode_gather(ad::constant(std::move(block_im)), weights)};
        eff[static_cast<std::size_t>(g)] = cmatmul(h_g, f_rf);

        ad::Tensor row = ad::slice_rows(residual, g, 1);
        ad::Tensor d_re = ad::reshape(ad::slice_cols(row, 0, nrf * k), nrf, k);
        ad::Tensor d_im = ad::reshape(ad::slice_cols(row, nrf * k, nrf * k), nrf, k);
        const Eigen::MatrixXcd& f0_g = f0[static_cast<std::size_t>(g)];
        fbb[static_cast<std::size_t>(g)] = {
            ad::add(ad::constant(f0_g.real()), d_re),
            ad::add(ad::constant(f0_g.imag()), d_im)};

        CxPair prod = cmatmul(f_rf, fbb[static_cast<std::size_t>(g)]);
        ad::Tensor power_g = ad::add(ad::sum(ad::mul(prod.re, prod.re)),
                                     ad::sum(ad::mul(prod.im, prod.im)));
        power_total = power_total ? ad::add(power_total, power_g) : power_g;
    }
    ad::Tensor scale =
        ad::sqrt(ad::div(ad::scalar(pt_watts_ * static_cast<double>(nc)), power_total));

    // Rate: per subcarrier, |h_u^H F f_j|^2 entries, then the SINR ratio
    // and sum of log terms; averaged over subcarriers at the end.
    ad::Tensor log_acc;
    for (int g = 0; g < nc; ++g) {
        CxPair fbb_n{ad::mul_scalar_t(fbb[static_cast<std::size_t>(g)].re, scale),
                     ad::mul_scalar_t(fbb[static_cast<std::size_t>(g)].im, scale)};
        CxPair t = cmatmul(eff[static_cast<std::size_t>(g)], fbb_n);
        ad::Tensor p = ad::add(ad::mul(t.re, t.re), ad::mul(t.im, t.im));
        ad::Tensor signal = ad::diag_part(p);
        ad::Tensor interference = ad::sub(ad::row_sum(p), signal);
        ad::Tensor gamma = ad::div(signal, ad::add_scalar(interference, sigma2_));
        ad::Tensor log_g = ad::sum(ad::log(ad::add_scalar(gamma, 1.0)));
        log_acc = log_acc ? ad::add(log_acc, log_g) : log_g;
    }
    ad::Tensor se =
        ad::mul_scalar(log_acc, 1.0 / (std::log(2.0) * static_cast<double>(nc)));

    Forward fwd;
    fwd.loss = ad::neg(se);
    fwd.se = se;
    fwd.selection = hard;
    return fwd;
}

BeamformingSolution PrHbfNet::infer(const EmCsiTensor& emcsi) const
{
    ad::NoGradGuard guard;
    if (emcsi.subcarriers() != sys_.num_subcarriers || emcsi.users() != sys_.num_users ||
        emcsi.antennas() != sys_.num_antennas || emcsi.modes() != sys_.num_patterns)
        throw ConfigError("sample dimensions do not match the model's system config");

    const int nt = sys_.num_antennas;
    const int nrf = sys_.num_rf_chains;
    const int nm = sys_.num_patterns;
    const int nc = sys_.num_subcarriers;
    const double feature_scale = 1.0 / tensor_rms(emcsi);

    PatternVector hard;
    if (force_mode >= 0) {
        if (force_mode >= nm)
            throw std::domain_error("forced mode " + std::to_string(force_mode) +
                                    " outside codebook of " + std::to_string(nm) + " modes");
        hard.assign(static_cast<std::size_t>(nt), force_mode);
    } else {
        selection_weights(emcsi, feature_scale, false, hard, nullptr);
    }

    const std::vector<Eigen::MatrixXcd> channels = apply_pattern(emcsi, hard);
    const AnalogPrecoder base = svd_analog_init(channels, mapping_);
    const Eigen::VectorXd theta0 =
        Eigen::Map<const Eigen::VectorXd>(base.phases.data(), nt);
    ad::Tensor theta = analog_phases(channels, theta0, feature_scale, nullptr);

    AnalogPrecoder analog;
    analog.phases.resize(static_cast<std::size_t>(nt));
    for (int m = 0; m < nt; ++m)
        analog.phases[static_cast<std::size_t>(m)] = theta->value(m, 0);
    const Eigen::MatrixXcd f_rf = analog.matrix(mapping_);

    // Digital baseline and features from the classical phases, matching the
    // training graph.
    const Eigen::MatrixXcd f_rf0 = base.matrix(mapping_);
    std::vector<Eigen::MatrixXcd> effective(static_cast<std::size_t>(nc));
    for (int g = 0; g < nc; ++g)
        effective[static_cast<std::size_t>(g)] = channels[static_cast<std::size_t>(g)] * f_rf0;
    const DigitalPrecoderSet f0 = svd_digital_init(effective, sigma2_, pt_watts_);
    const Eigen::MatrixXd residual = digital_residual(effective, feature_scale, nullptr)->value;

    const int k = sys_.num_users;
    DigitalPrecoderSet digital(static_cast<std::size_t>(nc));
    for (int g = 0; g < nc; ++g) {
        Eigen::MatrixXcd f = f0[static_cast<std::size_t>(g)];
        for (int r = 0; r < nrf; ++r)
            for (int u = 0; u < k; ++u)
                f(r, u) += cplx(residual(g, r * k + u), residual(g, nrf * k + r * k + u));
        digital[static_cast<std::size_t>(g)] = std::move(f);
    }
    digital = normalize_power(digital, analog, mapping_, pt_watts_);

    BeamformingSolution sol;
    sol.c = hard;
    sol.analog = std::move(analog);
    sol.digital = std::move(digital);
    sol.achieved_se = sum_se(channels, f_rf, sol.digital, sigma2_);
    return sol;
}

std::string PrHbfNet::metadata_text() const
{
    ConfigMap map;
    system_config_to_map(sys_, map);
    map.set_int("net", "depth", cfg_.depth);
    map.set_int("net", "d_model", cfg_.d_model);
    map.set_int("net", "num_heads", cfg_.num_heads);
    map.set_int("net", "d_ff", cfg_.d_ff);
    map.set_double("net", "dropout", cfg_.dropout);
    map.set_int("net", "pilot_subcarriers", cfg_.pilot_subcarriers);
    map.set_double("net", "ste_temperature", cfg_.ste_temperature);
    return map.serialize();
}

PrHbfNet PrHbfNet::from_metadata(const std::string& text, std::uint64_t init_seed)
{
    const ConfigMap map = ConfigMap::parse(text);
    const SystemConfig sys = system_config_from_map(map);
    PrHbfNetConfig cfg;
    cfg.depth = map.get_int("net", "depth", cfg.depth);
    cfg.d_model = map.get_int("net", "d_model", cfg.d_model);
    cfg.num_heads = map.get_int("net", "num_heads", cfg.num_heads);
    cfg.d_ff = map.get_int("net", "d_ff", cfg.d_ff);
    cfg.dropout = map.get_double("net", "dropout", cfg.dropout);
    cfg.pilot_subcarriers = map.get_int("net", "pilot_subcarriers", cfg.pilot_subcarriers);
    cfg.ste_temperature = map.get_double("net", "ste_temperature", cfg.ste_temperature);
    return PrHbfNet(sys, cfg, init_seed);
}

} // namespace rpabeam
