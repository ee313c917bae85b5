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

#include "rpabeam/transformer.hpp"

#include <cmath>
#include <stdexcept>

namespace rpabeam::nn {

void TransformerEncoderConfig::validate() const
{
    if (input_dim <= 0)
        throw std::invalid_argument("encoder config: input_dim must be positive");
    if (max_tokens <= 0)
        throw std::invalid_argument("encoder config: max_tokens must be positive");
    if (depth <= 0)
        throw std::invalid_argument("encoder config: depth must be positive");
    if (d_model <= 0 || num_heads <= 0 || d_ff <= 0)
        throw std::invalid_argument("encoder config: model dimensions must be positive");
    if (d_model % num_heads != 0)
        throw std::invalid_argument("encoder config: d_model must be divisible by num_heads");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("encoder config: dropout must lie in [0, 1)");
}

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng)
{
    const double bound = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            w(i, j) = rng.uniform(-bound, bound);
    return w;
}

namespace {

Eigen::MatrixXd small_normal(int rows, int cols, Rng& rng, double stddev)
{
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            w(i, j) = stddev * rng.normal();
    return w;
}

} // namespace

TransformerEncoder::TransformerEncoder(const TransformerEncoderConfig& cfg,
                                       const std::string& prefix, ad::ParameterStore& store,
                                       Rng& init_rng)
    : cfg_(cfg)
{
    cfg_.validate();
    const int d = cfg_.d_model;

    embed_w_ = store.add(prefix + ".embed.w", glorot_uniform(cfg_.input_dim, d, init_rng));
    embed_b_ = store.add(prefix + ".embed.b", Eigen::MatrixXd::Zero(1, d));
    pos_ = store.add(prefix + ".pos", small_normal(cfg_.max_tokens, d, init_rng, 0.02));

    layers_.reserve(static_cast<std::size_t>(cfg_.depth));
    for (int l = 0; l < cfg_.depth; ++l) {
        const std::string base = prefix + ".layer" + std::to_string(l);
        Layer layer;
        layer.ln1_gamma = store.add(base + ".ln1.gamma", Eigen::MatrixXd::Ones(1, d));
        layer.ln1_beta = store.add(base + ".ln1.beta", Eigen::MatrixXd::Zero(1, d));
        layer.wq = store.add(base + ".attn.wq", glorot_uniform(d, d, init_rng));
        layer.bq = store.add(base + ".attn.bq", Eigen::MatrixXd::Zero(1, d));
        layer.wk = store.add(base + ".attn.wk", glorot_uniform(d, d, init_rng));
        layer.bk = store.add(base + ".attn.bk", Eigen::MatrixXd::Zero(1, d));
        layer.wv = store.add(base + ".attn.wv", glorot_uniform(d, d, init_rng));
        layer.bv = store.add(base + ".attn.bv", Eigen::MatrixXd::Zero(1, d));
        layer.wo = store.add(base + ".attn.wo", glorot_uniform(d, d, init_rng));
        layer.bo = store.add(base + ".attn.bo", Eigen::MatrixXd::Zero(1, d));
        layer.ln2_gamma = store.add(base + ".ln2.gamma", Eigen::MatrixXd::Ones(1, d));
        layer.ln2_beta = store.add(base + ".ln2.beta", Eigen::MatrixXd::Zero(1, d));
        layer.w1 = store.add(base + ".ff.w1", glorot_uniform(d, cfg_.d_ff, init_rng));
        layer.b1 = store.add(base + ".ff.b1", Eigen::MatrixXd::Zero(1, cfg_.d_ff));
        layer.w2 = store.add(base + ".ff.w2", glorot_uniform(cfg_.d_ff, d, init_rng));
        layer.b2 = store.add(base + ".ff.b2", Eigen::MatrixXd::Zero(1, d));
        layers_.push_back(std::move(layer));
    }

    final_gamma_ = store.add(prefix + ".final.gamma", Eigen::MatrixXd::Ones(1, d));
    final_beta_ = store.add(prefix + ".final.beta", Eigen::MatrixXd::Zero(1, d));
}

ad::Tensor TransformerEncoder::layer_norm_affine(const ad::Tensor& x, const ad::Tensor& gamma,
                                                 const ad::Tensor& beta) const
{
    return ad::add_rowvec(ad::scale_cols(ad::layer_norm_rows(x), gamma), beta);
}

ad::Tensor TransformerEncoder::attention(const ad::Tensor& h, const Layer& layer) const
{
    const int dh = cfg_.head_dim();
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

    ad::Tensor q = ad::add_rowvec(ad::matmul(h, layer.wq), layer.bq);
    ad::Tensor k = ad::add_rowvec(ad::matmul(h, layer.wk), layer.bk);
    ad::Tensor v = ad::add_rowvec(ad::matmul(h, layer.wv), layer.bv);

    std::vector<ad::Tensor> heads;
    heads.reserve(static_cast<std::size_t>(cfg_.num_heads));
    for (int i = 0; i < cfg_.num_heads; ++i) {
        ad::Tensor qh = ad::slice_cols(q, static_cast<Eigen::Index>(i) * dh, dh);
        ad::Tensor kh = ad::slice_cols(k, static_cast<Eigen::Index>(i) * dh, dh);
        ad::Tensor vh = ad::slice_cols(v, static_cast<Eigen::Index>(i) * dh, dh);
        ad::Tensor scores =
            ad::mul_scalar(ad::matmul(qh, ad::transpose(kh)), inv_sqrt_dh);
        heads.push_back(ad::matmul(ad::softmax_rows(scores), vh));
    }
    return ad::add_rowvec(ad::matmul(ad::concat_cols(heads), layer.wo), layer.bo);
}

ad::Tensor TransformerEncoder::maybe_dropout(const ad::Tensor& x, Rng* rng) const
{
    if (cfg_.dropout <= 0.0 || rng == nullptr)
        return x;
    const double keep = 1.0 - cfg_.dropout;
    Eigen::MatrixXd mask(x->rows(), x->cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
            mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
    return ad::mul(x, ad::constant(std::move(mask)));
}

ad::Tensor TransformerEncoder::forward(const ad::Tensor& tokens, Rng* dropout_rng) const
{
    if (!tokens)
        throw std::invalid_argument("encoder forward: null token tensor");
    if (tokens->cols() != cfg_.input_dim)
        throw std::invalid_argument("encoder forward: tokens have " +
                                    std::to_string(tokens->cols()) + " features, expected " +
                                    std::to_string(cfg_.input_dim));
    if (tokens->rows() > cfg_.max_tokens)
        throw std::invalid_argument("encoder forward: " + std::to_string(tokens->rows()) +
                                    " tokens exceed the position table of " +
                                    std::to_string(cfg_.max_tokens));

    ad::Tensor x = ad::add_rowvec(ad::matmul(tokens, embed_w_), embed_b_);
    x = ad::add(x, ad::slice_rows(pos_, 0, tokens->rows()));

    for (const Layer& layer : layers_) {
        ad::Tensor attn = attention(layer_norm_affine(x, layer.ln1_gamma, layer.ln1_beta), layer);
        x = ad::add(x, maybe_dropout(attn, dropout_rng));
        ad::Tensor normed = layer_norm_affine(x, layer.ln2_gamma, layer.ln2_beta);
        ad::Tensor ff = ad::matmul(ad::gelu(ad::add_rowvec(ad::matmul(normed, layer.w1), layer.b1)),
                                   layer.w2);
        ff = ad::add_rowvec(ff, layer.b2);
        x = ad::add(x, maybe_dropout(ff, dropout_rng));
    }
    return layer_norm_affine(x, final_gamma_, final_beta_);
}

} // namespace rpabeam::nn
