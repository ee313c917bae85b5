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

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rpabeam/autodiff.hpp"
#include "rpabeam/baselines.hpp"
#include "rpabeam/channel.hpp"
#include "rpabeam/transformer.hpp"

namespace rpabeam {

/// Network hyperparameters; the three token encoders share one shape.
struct PrHbfNetConfig {
    int depth = 2;
    int d_model = 64;
    int num_heads = 4;
    int d_ff = 128;
    double dropout = 0.0;
    /// Requested pilot subcarrier count for input features; the effective
    /// count is the largest divisor of Nc that does not exceed it.
    int pilot_subcarriers = 8;
    /// Softmax temperature of the straight-through mode selection.
    double ste_temperature = 1.0;

    void validate() const;
};

/// Learned end-to-end optimizer over the full channel tensor. Three
/// transformer encoders run in sequence: one scores radiation modes per
/// antenna (trained through a straight-through argmax), one refines the
/// per-antenna analog phases as a residual on the subarray eigen-phase
/// baseline, and one refines the per-user digital precoder as a residual
/// on the regularized zero-forcing baseline. The digital output is power
/// normalized inside the graph, so the training loss (negative average
/// spectral efficiency) sees the same constraint as the closed-form
/// solvers.
class PrHbfNet {
  public:
    PrHbfNet(const SystemConfig& sys, const PrHbfNetConfig& cfg, std::uint64_t init_seed);

    /// Differentiable forward pass for one sample. With relaxed_selection
    /// the hard one-hot selection is replaced by its softmax surrogate,
    /// making the graph smooth end to end for derivative checks.
    struct Forward {
        ad::Tensor loss;         ///< scalar, negative average spectral efficiency
        ad::Tensor se;           ///< scalar, average spectral efficiency
        PatternVector selection; ///< hard per-antenna modes of this pass
    };
    Forward sample_loss(const EmCsiTensor& emcsi, bool relaxed_selection = false,
                        Rng* dropout_rng = nullptr) const;

    /// Graph-free inference: hard mode selection, residual analog and
    /// digital refinement, power normalization, and the realized rate.
    BeamformingSolution infer(const EmCsiTensor& emcsi) const;

    ad::ParameterStore& params() { return store_; }
    const ad::ParameterStore& params() const { return store_; }
    const SystemConfig& system() const { return sys_; }
    const PrHbfNetConfig& config() const { return cfg_; }
    int effective_pilots() const { return static_cast<int>(pilot_idx_.size()); }

    /// Test hook: when >= 0, every antenna is pinned to this mode and the
    /// selection encoder is bypassed.
    int force_mode = -1;

    /// Training hook: standard deviation of Gaussian noise added to the
    /// selection logits when a dropout generator is supplied. The noisy
    /// argmax exposes the scorer to alternative selections early in
    /// training; once the logit margins grow past the noise scale the
    /// exploration fades out on its own. Gradients flow to the clean
    /// logits; inference never sees noise.
    double selection_noise = 0.0;

    /// Serialized system + network config, stored in checkpoints so a
    /// model can be rebuilt from the file alone.
    std::string metadata_text() const;
    static PrHbfNet from_metadata(const std::string& text, std::uint64_t init_seed = 0);

  private:
    ad::Tensor selection_weights(const EmCsiTensor& emcsi, double feature_scale,
                                 bool relaxed, PatternVector& hard, Rng* dropout_rng) const;
    ad::Tensor analog_phases(const std::vector<Eigen::MatrixXcd>& channels,
                             const Eigen::VectorXd& theta0, double feature_scale,
                             Rng* dropout_rng) const;
    ad::Tensor digital_residual(const std::vector<Eigen::MatrixXcd>& effective,
                                double feature_scale, Rng* dropout_rng) const;

    SystemConfig sys_;
    PrHbfNetConfig cfg_;
    std::vector<int> pilot_idx_;
    SubarrayMapping mapping_;
    double sigma2_ = 0.0;
    double pt_watts_ = 0.0;
    Eigen::MatrixXd chain_mask_; // (Nt, N_RF) subarray support indicator

    ad::ParameterStore store_;
    std::unique_ptr<nn::TransformerEncoder> pattern_enc_;
    std::unique_ptr<nn::TransformerEncoder> analog_enc_;
    std::unique_ptr<nn::TransformerEncoder> digital_enc_;
    ad::Tensor pattern_head_w_, pattern_head_b_;
    ad::Tensor analog_head_w_, analog_head_b_;
    ad::Tensor digital_head_w_, digital_head_b_;
};

/// Evenly strided pilot subcarrier indices; the count is the largest
/// divisor of num_subcarriers not exceeding requested (and at least 1).
std::vector<int> pilot_indices(int num_subcarriers, int requested);

} // namespace rpabeam
