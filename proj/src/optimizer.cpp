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

#include "rpabeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpabeam::nn {

Adam::Adam(ad::ParameterStore& store, AdamConfig cfg) : store_(store), cfg_(cfg)
{
    if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0) || !(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0))
        throw std::invalid_argument("adam: decay rates must lie in [0, 1)");
    if (!(cfg_.eps > 0.0))
        throw std::invalid_argument("adam: eps must be positive");
    m_.reserve(store.size());
    v_.reserve(store.size());
    for (const auto& [name, tensor] : store.items()) {
        m_.push_back(Eigen::MatrixXd::Zero(tensor->rows(), tensor->cols()));
        v_.push_back(Eigen::MatrixXd::Zero(tensor->rows(), tensor->cols()));
    }
}

void Adam::step(double lr)
{
    if (store_.size() != m_.size())
        throw std::logic_error("adam: parameter store changed size after construction");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::size_t i = 0;
    for (const auto& [name, tensor] : store_.items()) {
        const Eigen::MatrixXd& g = tensor->grad;
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
        v_[i] = (cfg_.beta2 * v_[i].array() + (1.0 - cfg_.beta2) * g.array().square()).matrix();
        const Eigen::ArrayXXd m_hat = m_[i].array() / bc1;
        const Eigen::ArrayXXd v_hat = v_[i].array() / bc2;
        tensor->value.array() -= lr * m_hat / (v_hat.sqrt() + cfg_.eps);
        ++i;
    }
}

double warmup_lr(double peak, std::int64_t step, std::int64_t warmup_steps)
{
    if (step < 1)
        throw std::invalid_argument("warmup_lr: steps are 1-based");
    if (warmup_steps < 1)
        throw std::invalid_argument("warmup_lr: warmup length must be at least 1");
    const double s = static_cast<double>(step);
    const double w = static_cast<double>(warmup_steps);
    return peak * std::min(s / w, std::sqrt(w / s));
}

} // namespace rpabeam::nn
