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
//
// Command-line front end: dataset generation, model training, solver
// evaluation and axis sweeps. Exit codes: 0 success, 2 configuration
// error, 3 I/O error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rpabeam/checkpoint.hpp"
#include "rpabeam/config_file.hpp"
#include "rpabeam/dataset.hpp"
#include "rpabeam/evaluate.hpp"
#include "rpabeam/manifest.hpp"
#include "rpabeam/prhbfnet.hpp"
#include "rpabeam/train.hpp"

namespace {

using namespace rpabeam;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

/// Worker count resolution: explicit flag, then RPABEAM_WORKERS, then 0
/// (library picks the hardware count).
int resolve_workers(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("RPABEAM_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return 0;
}

/// Applies `--set section.key=value` strings onto a parsed config map.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& sets)
{
    for (const std::string& s : sets) {
        const std::size_t eq = s.find('=');
        const std::size_t dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 ||
            dot + 1 == eq)
            throw ConfigError("--set expects section.key=value, got '" + s + "'");
        map.set_string(s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
}

/// System config from an optional file plus overrides; unknown keys are
/// rejected so typos fail loudly.
SystemConfig config_from_cli(const std::string& config_path,
                             const std::vector<std::string>& sets)
{
    ConfigMap map =
        config_path.empty() ? ConfigMap::parse("") : ConfigMap::load_file(config_path);
    apply_overrides(map, sets);
    SystemConfig cfg = system_config_from_map(map);
    map.reject_unconsumed();
    return cfg;
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item = text.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!item.empty())
            out.push_back(item);
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": cannot parse '" + text + "' as a number");
    }
}

// --- gen-data -------------------------------------------------------------

struct GenDataArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool float32 = false;
    int workers = 0;
    std::uint64_t max_bytes = std::uint64_t{8} << 30;
};

int run_gen_data(const GenDataArgs& args)
{
    SystemConfig cfg = config_from_cli(args.config_path, args.sets);
    const std::uint64_t seed = args.seed_given ? args.seed : cfg.rng_seed;

    DatasetWriteOptions opts;
    opts.float_width = args.float32 ? 4 : 8;
    opts.workers = resolve_workers(args.workers);
    opts.max_bytes = args.max_bytes;
    generate_dataset(cfg, args.count, seed, args.out_path, opts);

    RunManifest manifest("gen-data");
    manifest.add_field("samples", std::to_string(args.count));
    manifest.add_field("seed", std::to_string(seed));
    manifest.add_field("float_width", std::to_string(opts.float_width));
    manifest.add_field("config", system_config_to_text(cfg));
    manifest.add_output(args.out_path);
    manifest.write(args.out_path + ".manifest");

    std::cout << "wrote " << args.count << " samples to " << args.out_path << "\n";
    return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
    std::string train_path;
    std::string val_path;
    std::string out_path;
    std::string last_path;
    std::string history_path;
    PrHbfNetConfig net;
    TrainConfig train;
    std::uint64_t init_seed = 1;
};

int run_train(const TrainArgs& args)
{
    DatasetReader train_data(args.train_path);
    DatasetReader val_data(args.val_path);

    PrHbfNet net(train_data.config(), args.net, args.init_seed);
    const std::string last_path =
        args.last_path.empty() ? args.out_path + ".last" : args.last_path;
    const TrainResult result =
        train_prhbfnet(net, train_data, val_data, args.train, args.out_path, last_path);

    for (const TrainEpoch& row : result.epochs)
        std::cout << "epoch " << row.epoch << "/" << args.train.epochs << " step " << row.step
                  << " lr " << format_double(row.lr) << " loss " << format_double(row.train_loss)
                  << " val_se " << format_double(row.val_se) << "\n";
    std::cout << "best epoch " << result.best_epoch << " val_se "
              << format_double(result.best_val_se) << "\n";

    if (!args.history_path.empty())
        write_history_csv(args.history_path, result);

    RunManifest manifest("train");
    manifest.add_field("train_data", args.train_path);
    manifest.add_field("val_data", args.val_path);
    manifest.add_field("epochs", std::to_string(args.train.epochs));
    manifest.add_field("batch_size", std::to_string(args.train.batch_size));
    manifest.add_field("peak_lr", format_double(args.train.peak_lr));
    manifest.add_field("warmup_steps", std::to_string(args.train.warmup_steps));
    manifest.add_field("shuffle_seed", std::to_string(args.train.shuffle_seed));
    manifest.add_field("init_seed", std::to_string(args.init_seed));
    manifest.add_field("stagewise", args.train.stagewise ? "true" : "false");
    manifest.add_field("best_epoch", std::to_string(result.best_epoch));
    manifest.add_field("best_val_se", format_double(result.best_val_se));
    if (result.best_epoch >= 0)
        manifest.add_output(args.out_path);
    manifest.add_output(last_path);
    if (!args.history_path.empty())
        manifest.add_output(args.history_path);
    manifest.write(args.out_path + ".manifest");
    return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string data_path;
    std::string solver = "fixed";
    std::string checkpoint_path;
    std::string out_path;
    int fixed_pattern = 1; // 1-based on the command line
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    std::uint64_t cap = 4096;
    double pt_dbm = 0.0;
    bool pt_given = false;
};

int run_eval(const EvalArgs& args)
{
    DatasetReader data(args.data_path);

    EvalOptions opts;
    opts.solver = solver_from_name(args.solver);
    if (args.fixed_pattern < 1)
        throw ConfigError("--pattern is 1-based and must be at least 1");
    opts.fixed_mode = args.fixed_pattern - 1;
    opts.random_seed = args.seed;
    opts.exhaustive_cap = args.cap;
    opts.max_samples = args.samples;
    if (args.pt_given)
        opts.pt_watts_override = dbm_to_watts(args.pt_dbm);

    std::optional<PrHbfNet> net;
    if (opts.solver == Solver::prhbfnet) {
        if (args.checkpoint_path.empty())
            throw ConfigError("solver 'prhbfnet' needs --checkpoint");
        std::string meta = read_checkpoint_metadata(args.checkpoint_path);
        if (args.pt_given) {
            ConfigMap map = ConfigMap::parse(meta);
            map.set_double("system", "transmit_power_dbm", args.pt_dbm);
            meta = map.serialize();
        }
        net = PrHbfNet::from_metadata(meta);
        load_checkpoint(args.checkpoint_path, net->params());
        opts.net = &*net;
    }

    const EvalStats stats = evaluate_dataset(data, opts);
    std::cout << "solver=" << solver_name(opts.solver) << " n=" << stats.per_sample.size()
              << " mean_se=" << format_double(stats.mean_se)
              << " std_se=" << format_double(stats.std_se) << "\n";

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path, std::ios::trunc);
        if (!out)
            throw IoError("eval output '" + args.out_path + "': cannot open for writing");
        out << "sample,solver,se\n";
        for (std::size_t i = 0; i < stats.per_sample.size(); ++i)
            out << i << ',' << solver_name(opts.solver) << ','
                << format_double(stats.per_sample[i]) << '\n';
        out.flush();
        if (!out)
            throw IoError("eval output '" + args.out_path + "': write failed");

        RunManifest manifest("eval");
        manifest.add_field("data", args.data_path);
        manifest.add_field("solver", solver_name(opts.solver));
        manifest.add_field("n", std::to_string(stats.per_sample.size()));
        manifest.add_field("mean_se", format_double(stats.mean_se));
        manifest.add_output(args.out_path);
        manifest.write(args.out_path + ".manifest");
    }
    return kExitOk;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    std::string axis = "pt_dbm";
    std::string values_text;
    std::string solvers_text = "fixed,random,greedy";
    std::string data_path;
    std::string config_path;
    std::vector<std::string> sets;
    std::string checkpoint_path;
    std::string out_path;
    std::uint64_t samples = 0;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int fixed_pattern = 1;
    std::uint64_t random_seed = 1;
    std::uint64_t cap = 4096;
    int workers = 0;
};

EvalOptions sweep_eval_options(const SweepArgs& args, Solver solver)
{
    EvalOptions opts;
    opts.solver = solver;
    if (args.fixed_pattern < 1)
        throw ConfigError("--pattern is 1-based and must be at least 1");
    opts.fixed_mode = args.fixed_pattern - 1;
    opts.random_seed = args.random_seed;
    opts.exhaustive_cap = args.cap;
    opts.max_samples = args.samples;
    return opts;
}

/// Rebuilds the learned model from checkpoint metadata, optionally with a
/// different power budget (parameter shapes do not depend on it).
PrHbfNet net_for_power(const std::string& checkpoint_path, const double* pt_dbm)
{
    std::string meta = read_checkpoint_metadata(checkpoint_path);
    if (pt_dbm) {
        ConfigMap map = ConfigMap::parse(meta);
        map.set_double("system", "transmit_power_dbm", *pt_dbm);
        meta = map.serialize();
    }
    PrHbfNet net = PrHbfNet::from_metadata(meta);
    load_checkpoint(checkpoint_path, net.params());
    return net;
}

int run_sweep(const SweepArgs& args)
{
    const std::vector<std::string> value_items = split_list(args.values_text);
    const std::vector<std::string> solver_items = split_list(args.solvers_text);
    if (value_items.empty())
        throw ConfigError("sweep: --values is empty");
    if (solver_items.empty())
        throw ConfigError("sweep: --solvers is empty");
    std::vector<Solver> solvers;
    for (const std::string& s : solver_items)
        solvers.push_back(solver_from_name(s));
    const bool needs_net =
        std::find(solvers.begin(), solvers.end(), Solver::prhbfnet) != solvers.end();
    if (needs_net && args.checkpoint_path.empty())
        throw ConfigError("sweep: solver 'prhbfnet' needs --checkpoint");

    std::ofstream out(args.out_path, std::ios::trunc);
    if (!out)
        throw IoError("sweep output '" + args.out_path + "': cannot open for writing");
    out << "axis,value,solver,mean_se,std_se,n\n";

    RunManifest manifest("sweep");
    manifest.add_field("axis", args.axis);
    manifest.add_field("values", args.values_text);
    manifest.add_field("solvers", args.solvers_text);

    auto emit = [&](const std::string& value, Solver solver, const EvalStats& stats) {
        out << args.axis << ',' << value << ',' << solver_name(solver) << ','
            << format_double(stats.mean_se) << ',' << format_double(stats.std_se) << ','
            << stats.per_sample.size() << '\n';
        std::cout << args.axis << "=" << value << " solver=" << solver_name(solver)
                  << " mean_se=" << format_double(stats.mean_se) << "\n";
    };

    if (args.axis == "pt_dbm") {
        if (args.data_path.empty())
            throw ConfigError("sweep over pt_dbm needs --data (tensors are power independent)");
        DatasetReader data(args.data_path);
        manifest.add_field("data", args.data_path);
        for (const std::string& item : value_items) {
            const double dbm = parse_number(item, "sweep value");
            for (Solver solver : solvers) {
                EvalOptions opts = sweep_eval_options(args, solver);
                opts.pt_watts_override = dbm_to_watts(dbm);
                std::optional<PrHbfNet> net;
                if (solver == Solver::prhbfnet) {
                    net = net_for_power(args.checkpoint_path, &dbm);
                    opts.net = &*net;
                }
                emit(item, solver, evaluate_dataset(data, opts));
            }
        }
    } else if (args.axis == "num_users") {
        if (args.count == 0)
            throw ConfigError("sweep over num_users needs --count to generate datasets");
        SystemConfig base = config_from_cli(args.config_path, args.sets);
        const std::uint64_t seed = args.seed_given ? args.seed : base.rng_seed;
        for (const std::string& item : value_items) {
            const double parsed = parse_number(item, "sweep value");
            const int k = static_cast<int>(parsed);
            if (parsed != static_cast<double>(k) || k < 1)
                throw ConfigError("sweep value '" + item + "' is not a valid user count");
            SystemConfig cfg = base;
            cfg.num_users = k;
            cfg.validate(); // rejects K above the RF chain count
            const std::string path = args.out_path + ".users" + std::to_string(k) + ".dataset";
            DatasetWriteOptions wopts;
            wopts.workers = resolve_workers(args.workers);
            generate_dataset(cfg, args.count, derive_seed(seed, static_cast<std::uint64_t>(k)),
                             path, wopts);
            manifest.add_output(path);
            DatasetReader data(path);
            for (Solver solver : solvers) {
                EvalOptions opts = sweep_eval_options(args, solver);
                std::optional<PrHbfNet> net;
                if (solver == Solver::prhbfnet) {
                    net = net_for_power(args.checkpoint_path, nullptr);
                    opts.net = &*net;
                }
                emit(item, solver, evaluate_dataset(data, opts));
            }
        }
    } else {
        throw ConfigError("sweep: unknown axis '" + args.axis +
                          "' (expected pt_dbm or num_users)");
    }

    out.flush();
    if (!out)
        throw IoError("sweep output '" + args.out_path + "': write failed");
    manifest.add_output(args.out_path);
    manifest.write(args.out_path + ".manifest");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybrid beamforming with pattern-reconfigurable antennas"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-data", "generate a channel dataset");
    gen->add_option("--config", gen_args.config_path, "system config file");
    gen->add_option("--set", gen_args.sets, "override config keys (section.key=value)");
    gen->add_option("--out", gen_args.out_path, "output dataset path")->required();
    gen->add_option("--count", gen_args.count, "number of samples")->required();
    gen->add_option("--seed", gen_args.seed, "master seed (default: config rng_seed)")
        ->each([&](const std::string&) { gen_args.seed_given = true; });
    gen->add_flag("--float32", gen_args.float32, "store 32-bit floats instead of 64-bit");
    gen->add_option("--workers", gen_args.workers, "generation threads (0 = auto)");
    gen->add_option("--max-bytes", gen_args.max_bytes, "refuse files larger than this");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train the end-to-end model");
    train_cmd->add_option("--train-data", train_args.train_path, "training dataset")->required();
    train_cmd->add_option("--val-data", train_args.val_path, "validation dataset")->required();
    train_cmd->add_option("--out", train_args.out_path, "best checkpoint path")->required();
    train_cmd->add_option("--last", train_args.last_path, "final checkpoint path");
    train_cmd->add_option("--history", train_args.history_path, "per-epoch CSV");
    train_cmd->add_option("--depth", train_args.net.depth, "encoder layers");
    train_cmd->add_option("--d-model", train_args.net.d_model, "token width");
    train_cmd->add_option("--heads", train_args.net.num_heads, "attention heads");
    train_cmd->add_option("--d-ff", train_args.net.d_ff, "feed-forward width");
    train_cmd->add_option("--dropout", train_args.net.dropout, "dropout probability");
    train_cmd->add_option("--pilots", train_args.net.pilot_subcarriers,
                          "pilot subcarriers for input features");
    train_cmd->add_option("--ste-temperature", train_args.net.ste_temperature,
                          "selection softmax temperature");
    train_cmd->add_option("--batch-size", train_args.train.batch_size, "samples per step");
    train_cmd->add_option("--epochs", train_args.train.epochs, "training epochs");
    train_cmd->add_option("--lr", train_args.train.peak_lr, "peak learning rate");
    train_cmd->add_option("--warmup", train_args.train.warmup_steps, "warmup steps");
    train_cmd->add_option("--shuffle-seed", train_args.train.shuffle_seed, "epoch shuffle seed");
    train_cmd->add_flag("--stagewise", train_args.train.stagewise,
                        "train the mode scorer alone for the first half of the epochs");
    train_cmd->add_option("--relaxed-epochs", train_args.train.relaxed_epochs,
                          "leading epochs trained on the softmax-relaxed selection");
    train_cmd->add_option("--selection-noise", train_args.train.selection_noise,
                          "exploration noise on the selection logits during training");
    train_cmd->add_option("--max-train-samples", train_args.train.max_train_samples,
                          "cap on training samples (0 = all)");
    train_cmd->add_option("--max-val-samples", train_args.train.max_val_samples,
                          "cap on validation samples (0 = all)");
    train_cmd->add_option("--init-seed", train_args.init_seed, "weight init seed");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a solver on a dataset");
    eval_cmd->add_option("--data", eval_args.data_path, "dataset path")->required();
    eval_cmd->add_option("--solver", eval_args.solver,
                         "fixed, random, greedy, exhaustive or prhbfnet")
        ->required();
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "model checkpoint");
    eval_cmd->add_option("--out", eval_args.out_path, "per-sample CSV");
    eval_cmd->add_option("--pattern", eval_args.fixed_pattern,
                         "1-based radiation mode for the fixed solver");
    eval_cmd->add_option("--samples", eval_args.samples, "sample cap (0 = all)");
    eval_cmd->add_option("--seed", eval_args.seed, "seed for the random solver");
    eval_cmd->add_option("--cap", eval_args.cap, "exhaustive enumeration cap");
    eval_cmd->add_option("--pt-dbm", eval_args.pt_dbm, "override the power budget (dBm)")
        ->each([&](const std::string&) { eval_args.pt_given = true; });

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "evaluate solvers along an axis");
    sweep_cmd->add_option("--axis", sweep_args.axis, "pt_dbm or num_users");
    sweep_cmd->add_option("--values", sweep_args.values_text, "comma-separated axis values")
        ->required();
    sweep_cmd->add_option("--solvers", sweep_args.solvers_text, "comma-separated solver list");
    sweep_cmd->add_option("--data", sweep_args.data_path, "dataset (pt_dbm axis)");
    sweep_cmd->add_option("--config", sweep_args.config_path, "base config (num_users axis)");
    sweep_cmd->add_option("--set", sweep_args.sets, "override config keys (section.key=value)");
    sweep_cmd->add_option("--checkpoint", sweep_args.checkpoint_path, "model checkpoint");
    sweep_cmd->add_option("--out", sweep_args.out_path, "tidy CSV output")->required();
    sweep_cmd->add_option("--samples", sweep_args.samples, "sample cap per point (0 = all)");
    sweep_cmd->add_option("--count", sweep_args.count, "samples to generate per point");
    sweep_cmd->add_option("--seed", sweep_args.seed, "generation seed (num_users axis)")
        ->each([&](const std::string&) { sweep_args.seed_given = true; });
    sweep_cmd->add_option("--pattern", sweep_args.fixed_pattern,
                          "1-based radiation mode for the fixed solver");
    sweep_cmd->add_option("--random-seed", sweep_args.random_seed, "seed for the random solver");
    sweep_cmd->add_option("--cap", sweep_args.cap, "exhaustive enumeration cap");
    sweep_cmd->add_option("--workers", sweep_args.workers, "generation threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*gen)
            return run_gen_data(gen_args);
        if (*train_cmd)
            return run_train(train_args);
        if (*eval_cmd)
            return run_eval(eval_args);
        if (*sweep_cmd)
            return run_sweep(sweep_args);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
