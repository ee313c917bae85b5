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

#include <string>
#include <vector>

#include "rpabeam/autodiff.hpp"
#include "rpabeam/rng.hpp"

namespace rpabeam::nn {

struct TransformerEncoderConfig {
    int input_dim = 0;  ///< raw feature length of one token
    int max_tokens = 0; ///< capacity of the learned position table
    int depth = 2;
    int d_model = 64;
    int num_heads = 4;
    int d_ff = 128;
    double dropout = 0.0;

    int head_dim() const { return d_model / num_heads; }
    void validate() const; ///< throws std::invalid_argument on a bad shape
};

/// Pre-norm transformer encoder over a token matrix (tokens x features):
/// x <- x + MHSA(LN(x)), x <- x + FFN(LN(x)), with a final LayerNorm.
/// Tokens are embedded linearly and given learned position offsets.
/// All weights live in the caller's ParameterStore under `prefix`.
class TransformerEncoder {
  public:
    TransformerEncoder(const TransformerEncoderConfig& cfg, const std::string& prefix,
                       ad::ParameterStore& store, Rng& init_rng);

    /// tokens is (n, input_dim) with n <= max_tokens; returns (n, d_model).
    /// When training with dropout > 0, pass the step generator; inference
    /// leaves it null and applies no dropout.
    ad::Tensor forward(const ad::Tensor& tokens, Rng* dropout_rng = nullptr) const;

    const TransformerEncoderConfig& config() const { return cfg_; }

  private:
    struct Layer {
        ad::Tensor ln1_gamma, ln1_beta;
        ad::Tensor wq, bq, wk, bk, wv, bv, wo, bo;
        ad::Tensor ln2_gamma, ln2_beta;
        ad::Tensor w1, b1, w2, b2;
    };

    ad::Tensor layer_norm_affine(const ad::Tensor& x, const ad::Tensor& gamma,
                                 const ad::Tensor& beta) const;
    ad::Tensor attention(const ad::Tensor& h, const Layer& layer) const;
    ad::Tensor maybe_dropout(const ad::Tensor& x, Rng* rng) const;

    TransformerEncoderConfig cfg_;
    ad::Tensor embed_w_, embed_b_, pos_;
    std::vector<Layer> layers_;
    ad::Tensor final_gamma_, final_beta_;
};

/// Dense layer weights drawn uniformly from the Glorot interval
/// [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))].
Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng);

} // namespace rpabeam::nn
