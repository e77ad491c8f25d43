#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mteach/concepts.hpp"
#include "mteach/environments.hpp"

namespace mteach {

enum class Experiment { Coin, Bandit, Dbn, Taxi, BitflipSeq };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Strategies accepted by an experiment, in their default order.
std::vector<std::string> default_strategies(Experiment e);

struct ExperimentConfig {
    Experiment experiment = Experiment::Coin;
    /// Empty selects default_strategies(experiment).
    std::vector<std::string> strategies;
    /// A single value, or a sweep when more than one is given. Empty selects
    /// the experiment default.
    std::vector<double> epsilons;
    double delta = 0.05;
    /// 0 selects the experiment default.
    std::size_t runs = 0;
    std::uint64_t seed = 1;

    double coin_bias = 0.5;
    /// Bandit arm counts; swept unless epsilon is.
    std::vector<std::size_t> arms = {2, 4, 6, 8, 10};
    /// Fixed arm means; empty draws uniform[0,1] means per trial.
    std::vector<double> bandit_means;
    /// DBN factor counts (dbn) or Bitflip widths (bitflip-seq); empty selects
    /// the experiment default.
    std::vector<std::size_t> bits;
    /// Fixed Bitflip shift probabilities; empty draws uniform[0,1] per trial.
    std::vector<double> bitflip_p;
    std::vector<std::size_t> stochastic_bits = {5, 8};
    double stochastic_p = 0.5;

    TaxiConfig taxi;
    std::vector<std::string> action_sets = {"pickup", "pickup-dropoff", "movement", "all"};

    std::string out;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;

    /// Copy with experiment defaults filled in.
    ExperimentConfig resolved() const;
    /// Throws std::invalid_argument on an inconsistent resolved configuration.
    void validate() const;
};

/// Evenly spaced in 1/epsilon between 1/hi and 1/lo inclusive, returned in
/// ascending epsilon order. Parses "lo:hi:steps".
std::vector<double> parse_epsilon_sweep(std::string_view text);

/// Statistic of one trial.
struct TrialRecord {
    std::string strategy;
    std::string sweep_value;
    std::size_t trial = 0;
    double steps = 0.0;
    /// Final model error of the delivered teaching (max over parameters), or
    /// 0/1 for exact learners (0 when the concept was recovered).
    double error = 0.0;
};

struct TrialStats {
    std::string experiment;
    std::string strategy;
    std::string sweep_param;
    std::string sweep_value;
    double sweep_numeric = 0.0;
    std::size_t runs = 0;
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator; 0 for one run).
    double std = 0.0;
    /// Normal-approximation half-width, 1.96 std / sqrt(runs).
    double ci95 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct ExperimentResult {
    std::vector<TrialStats> stats;
    /// Grouped like `stats`, trial index ascending within a group.
    std::vector<TrialRecord> records;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

TrialStats summarize(std::string_view experiment, std::string_view strategy, std::string_view sweep_param,
                     std::string_view sweep_value, double sweep_numeric, std::span<const double> values);

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string to_csv(const std::vector<TrialStats>& stats);

/// Throws std::invalid_argument on empty stats and std::runtime_error when
/// the file cannot be written.
void emit_csv(const std::vector<TrialStats>& stats, const std::filesystem::path& path);

struct ScalingFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Ordinary least squares of y on x.
ScalingFit fit_scaling(std::span<const double> x, std::span<const double> y);

/// Mean steps against 1/epsilon for one strategy of an epsilon sweep; needs at
/// least four sweep points.
ScalingFit fit_scaling(const std::vector<TrialStats>& stats, std::string_view strategy);

// Structured configuration --------------------------------------------------------

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const MonotoneConjunction& c);
MonotoneConjunction conjunction_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BernoulliConcept& c);
BernoulliConcept bernoulli_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BanditConcept& c);
BanditConcept bandit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DbnConcept& c);
DbnConcept dbn_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaxiConfig& c);
TaxiConfig taxi_config_from_json(const nlohmann::json& j);

}  // namespace mteach
