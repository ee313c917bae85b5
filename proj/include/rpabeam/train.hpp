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
#include <string>
#include <vector>

#include "rpabeam/dataset.hpp"
#include "rpabeam/prhbfnet.hpp"

namespace rpabeam {

struct TrainConfig {
    int batch_size = 16;
    int epochs = 20;
    double peak_lr = 1e-3;
    int warmup_steps = 100;
    std::uint64_t shuffle_seed = 1;
    /// When set, the first half of the epochs updates only the mode
    /// selection stage; the remaining epochs update everything jointly.
    bool stagewise = false;
    /// Number of leading epochs trained on the softmax-relaxed selection
    /// surrogate instead of the hard straight-through forward. The smooth
    /// blend gives the mode scorer exact gradients before the discrete
    /// fine-tuning phase.
    int relaxed_epochs = 0;
    /// Standard deviation of exploration noise on the selection logits
    /// during training steps (see PrHbfNet::selection_noise). Zero keeps
    /// the deterministic argmax forward.
    double selection_noise = 0.0;
    std::uint64_t max_train_samples = 0; ///< 0 = use the whole file
    std::uint64_t max_val_samples = 0;   ///< 0 = use the whole file

    void validate() const;
};

struct TrainEpoch {
    int epoch = 0;          ///< 1-based
    std::int64_t step = 0;  ///< global optimizer step at epoch end
    double lr = 0.0;        ///< learning rate of the last step
    double train_loss = 0.0; ///< mean per-sample loss over the epoch
    double val_se = 0.0;    ///< mean inference rate on the validation set
};

struct TrainResult {
    std::vector<TrainEpoch> epochs;
    double best_val_se = 0.0;
    int best_epoch = -1; ///< -1 when no epoch ran
};

/// Adam training of the end-to-end model on a generated dataset with a
/// warmup/inverse-sqrt schedule and a deterministic per-epoch shuffle.
/// After every epoch the validation rate is measured with graph-free
/// inference; the best and final parameter sets are written to the given
/// paths when non-empty (with the model metadata embedded).
TrainResult train_prhbfnet(PrHbfNet& net, const DatasetReader& train_data,
                           const DatasetReader& val_data, const TrainConfig& cfg,
                           const std::string& best_checkpoint_path = "",
                           const std::string& last_checkpoint_path = "");

/// Writes one CSV row per epoch: step,lr,loss,mean_se.
void write_history_csv(const std::string& path, const TrainResult& result);

} // namespace rpabeam
