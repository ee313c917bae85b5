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

#include "rpabeam/train.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "rpabeam/checkpoint.hpp"
#include "rpabeam/config_file.hpp"
#include "rpabeam/optimizer.hpp"

namespace rpabeam {
namespace {

void check_dataset_matches(const char* which, const DatasetReader& data, const SystemConfig& sys)
{
    const DatasetHeader& h = data.header();
    if (h.num_subcarriers != static_cast<std::uint32_t>(sys.num_subcarriers) ||
        h.num_users != static_cast<std::uint32_t>(sys.num_users) ||
        h.num_antennas != static_cast<std::uint32_t>(sys.num_antennas) ||
        h.num_patterns != static_cast<std::uint32_t>(sys.num_patterns))
        throw ConfigError(std::string(which) +
                          " dataset dimensions do not match the model's system config");
}

std::uint64_t capped(std::uint64_t available, std::uint64_t cap)
{
    return cap == 0 ? available : std::min(available, cap);
}

/// Fisher-Yates shuffle driven by the project generator so epoch order is
/// platform independent.
void shuffle_indices(std::vector<std::uint64_t>& idx, Rng& rng)
{
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.integer(static_cast<std::uint64_t>(i))]);
}

double validation_rate(const PrHbfNet& net, const DatasetReader& data, std::uint64_t count)
{
    if (count == 0)
        return 0.0;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < count; ++i)
        acc += net.infer(data.load_sample(i)).achieved_se;
    return acc / static_cast<double>(count);
}

} // namespace

void TrainConfig::validate() const
{
    if (batch_size <= 0)
        throw ConfigError("train config: batch_size must be positive");
    if (epochs < 0)
        throw ConfigError("train config: epochs must be non-negative");
    if (!(peak_lr > 0.0))
        throw ConfigError("train config: peak_lr must be positive");
    if (warmup_steps < 1)
        throw ConfigError("train config: warmup_steps must be at least 1");
    if (relaxed_epochs < 0)
        throw ConfigError("train config: relaxed_epochs must be non-negative");
    if (selection_noise < 0.0)
        throw ConfigError("train config: selection_noise must be non-negative");
}

TrainResult train_prhbfnet(PrHbfNet& net, const DatasetReader& train_data,
                           const DatasetReader& val_data, const TrainConfig& cfg,
                           const std::string& best_checkpoint_path,
                           const std::string& last_checkpoint_path)
{
    cfg.validate();
    check_dataset_matches("training", train_data, net.system());
    check_dataset_matches("validation", val_data, net.system());

    const std::uint64_t n_train = capped(train_data.size(), cfg.max_train_samples);
    const std::uint64_t n_val = capped(val_data.size(), cfg.max_val_samples);
    if (n_train == 0)
        throw ConfigError("train config: training dataset is empty");

    nn::Adam opt(net.params());
    const std::string metadata = net.metadata_text();
    const double saved_noise = net.selection_noise;
    net.selection_noise = cfg.selection_noise;
    TrainResult result;
    std::int64_t global_step = 0;

    std::vector<std::uint64_t> order(n_train);
    std::iota(order.begin(), order.end(), std::uint64_t{0});

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.shuffle_seed, static_cast<std::uint64_t>(epoch)));
        shuffle_indices(order, shuffle_rng);
        Rng dropout_rng(
            derive_seed(cfg.shuffle_seed, 0x626174636800ull + static_cast<std::uint64_t>(epoch)));

        // In stagewise mode the first half of the budget (rounded up) trains
        // the mode scorer alone; other gradients are dropped before the
        // update.
        const bool selection_only = cfg.stagewise && epoch <= (cfg.epochs + 1) / 2;
        const bool relaxed = epoch <= cfg.relaxed_epochs;

        double epoch_loss = 0.0;
        double last_lr = 0.0;
        for (std::uint64_t start = 0; start < n_train;
             start += static_cast<std::uint64_t>(cfg.batch_size)) {
            const std::uint64_t stop =
                std::min(n_train, start + static_cast<std::uint64_t>(cfg.batch_size));
            opt.zero_grad();
            ad::Tensor batch_loss;
            for (std::uint64_t i = start; i < stop; ++i) {
                const EmCsiTensor sample = train_data.load_sample(order[i]);
                ad::Tensor loss = net.sample_loss(sample, relaxed, &dropout_rng).loss;
                batch_loss = batch_loss ? ad::add(batch_loss, loss) : loss;
            }
            batch_loss = ad::mul_scalar(batch_loss, 1.0 / static_cast<double>(stop - start));
            ad::backward(batch_loss);
            if (selection_only)
                for (const auto& [name, tensor] : net.params().items())
                    if (name.rfind("prn.", 0) != 0)
                        tensor->grad.setZero();
            ++global_step;
            last_lr = nn::warmup_lr(cfg.peak_lr, global_step, cfg.warmup_steps);
            opt.step(last_lr);
            epoch_loss += batch_loss->scalar() * static_cast<double>(stop - start);
        }

        TrainEpoch row;
        row.epoch = epoch;
        row.step = global_step;
        row.lr = last_lr;
        row.train_loss = epoch_loss / static_cast<double>(n_train);
        row.val_se = validation_rate(net, val_data, n_val);
        result.epochs.push_back(row);

        if (result.best_epoch < 0 || row.val_se > result.best_val_se) {
            result.best_val_se = row.val_se;
            result.best_epoch = epoch;
            if (!best_checkpoint_path.empty())
                save_checkpoint(best_checkpoint_path, net.params(), metadata);
        }
    }

    net.selection_noise = saved_noise;
    if (!last_checkpoint_path.empty())
        save_checkpoint(last_checkpoint_path, net.params(), metadata);
    return result;
}

void write_history_csv(const std::string& path, const TrainResult& result)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("history '" + path + "': cannot open for writing");
    out << "step,lr,loss,mean_se\n";
    for (const TrainEpoch& row : result.epochs)
        out << row.step << ',' << format_double(row.lr) << ',' << format_double(row.train_loss)
            << ',' << format_double(row.val_se) << '\n';
    out.flush();
    if (!out)
        throw IoError("history '" + path + "': write failed");
}

} // namespace rpabeam
