#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mteach/harness.hpp"

namespace {

struct Flags {
    std::optional<double> epsilon;
    std::optional<std::string> epsilon_sweep;
    std::optional<double> delta;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> strategies;
    std::vector<std::size_t> bits;
    std::vector<std::size_t> arms;
    std::vector<std::string> action_sets;
    std::optional<double> coin_bias;
    std::optional<double> stochastic_p;
    std::optional<unsigned> threads;
    std::string out;
    std::string config;
};

void add_flags(CLI::App* cmd, Flags& f) {
    auto* eps = cmd->add_option("--epsilon", f.epsilon, "Accuracy parameter");
    cmd->add_option("--epsilon-sweep", f.epsilon_sweep, "Sweep lo:hi:steps, evenly spaced in 1/epsilon")
        ->excludes(eps);
    cmd->add_option("--delta", f.delta, "Confidence parameter");
    cmd->add_option("--runs", f.runs, "Trials per strategy and sweep point");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--strategies", f.strategies, "Strategies to run")->delimiter(',');
    cmd->add_option("--bits", f.bits, "Bit counts (dbn, bitflip-seq)")->delimiter(',');
    cmd->add_option("--arms", f.arms, "Arm counts (bandit)")->delimiter(',');
    cmd->add_option("--action-sets", f.action_sets, "Taxi action sets")->delimiter(',');
    cmd->add_option("--coin-bias", f.coin_bias, "Coin bias (coin)");
    cmd->add_option("--stochastic-p", f.stochastic_p, "Shift success of the stochastic bits (bitflip-seq)");
    cmd->add_option("--threads", f.threads, "Worker threads, 0 for all cores");
    cmd->add_option("--out", f.out, "CSV output path (stdout when omitted)");
    cmd->add_option("--config", f.config, "JSON experiment config; flags override its fields");
}

mteach::ExperimentConfig build_config(mteach::Experiment experiment, const Flags& f) {
    mteach::ExperimentConfig c;
    if (!f.config.empty()) {
        c = mteach::load_config(f.config);
        if (c.experiment != experiment) {
            throw std::invalid_argument("config describes the " + std::string(mteach::to_string(c.experiment)) +
                                        " experiment, not " + std::string(mteach::to_string(experiment)));
        }
    }
    c.experiment = experiment;
    if (f.epsilon) c.epsilons = {*f.epsilon};
    if (f.epsilon_sweep) c.epsilons = mteach::parse_epsilon_sweep(*f.epsilon_sweep);
    if (f.delta) c.delta = *f.delta;
    if (f.runs) c.runs = *f.runs;
    if (f.seed) c.seed = *f.seed;
    if (!f.strategies.empty()) c.strategies = f.strategies;
    if (!f.bits.empty()) c.bits = f.bits;
    if (!f.arms.empty()) c.arms = f.arms;
    if (!f.action_sets.empty()) c.action_sets = f.action_sets;
    if (f.coin_bias) c.coin_bias = *f.coin_bias;
    if (f.stochastic_p) c.stochastic_p = *f.stochastic_p;
    if (f.threads) c.threads = *f.threads;
    if (!f.out.empty()) c.out = f.out;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy machine teaching experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<std::pair<CLI::App*, mteach::Experiment>> commands;
    for (auto e : {mteach::Experiment::Coin, mteach::Experiment::Bandit, mteach::Experiment::Dbn,
                   mteach::Experiment::Taxi, mteach::Experiment::BitflipSeq}) {
        auto* cmd = app.add_subcommand(std::string(mteach::to_string(e)));
        add_flags(cmd, flags);
        commands.emplace_back(cmd, e);
    }
    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& [cmd, experiment] : commands) {
            if (!cmd->parsed()) continue;
            const auto config = build_config(experiment, flags);
            const auto result = mteach::run_experiment(config);
            if (config.out.empty()) {
                std::cout << mteach::to_csv(result.stats);
            } else {
                mteach::emit_csv(result.stats, config.out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
