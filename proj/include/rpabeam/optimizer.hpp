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
#include <vector>

#include "rpabeam/autodiff.hpp"

namespace rpabeam::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias-corrected moment estimates. Moment buffers follow the
/// store's insertion order, so one optimizer must stay paired with one
/// store whose parameter set does not change.
class Adam {
  public:
    explicit Adam(ad::ParameterStore& store, AdamConfig cfg = {});

    /// Applies one update from the currently accumulated gradients.
    void step(double lr);
    void zero_grad() { store_.zero_grad(); }
    std::int64_t steps_taken() const { return t_; }

  private:
    ad::ParameterStore& store_;
    AdamConfig cfg_;
    std::int64_t t_ = 0;
    std::vector<Eigen::MatrixXd> m_;
    std::vector<Eigen::MatrixXd> v_;
};

/// Linear warmup to `peak` over `warmup_steps`, then inverse-square-root
/// decay: peak * min(step / warmup, sqrt(warmup / step)) for 1-based steps.
double warmup_lr(double peak, std::int64_t step, std::int64_t warmup_steps);

} // namespace rpabeam::nn
