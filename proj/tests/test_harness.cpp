#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mteach/harness.hpp"

using namespace mteach;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

ExperimentConfig small(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.runs = 20;
    c.seed = 7;
    return c;
}

}  // namespace

TEST_CASE("epsilon sweeps are evenly spaced in one over epsilon") {
    const auto eps = parse_epsilon_sweep("0.02:0.1:5");
    REQUIRE(eps.size() == 5);
    const std::vector<double> inv = {50, 40, 30, 20, 10};
    for (std::size_t i = 0; i < 5; ++i) CHECK(1.0 / eps[i] == doctest::Approx(inv[i]));
    CHECK(eps.front() == 0.02);
    CHECK(eps.back() == 0.1);
    for (const char* bad : {"0.1:0.02:5", "0.02:0.1", "0.02:0.1:1", "a:0.1:3", "0.02:0.1:3:4", "0:0.1:3"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_epsilon_sweep(bad), std::invalid_argument);
    }
}

TEST_CASE("ntd coin rows have zero variance") {
    auto c = small(Experiment::Coin);
    c.epsilons = {0.1};
    const auto r = run_experiment(c);
    REQUIRE(r.stats.size() == 2);
    const auto& ntd = r.stats[0];
    CHECK(ntd.strategy == "NTD");
    CHECK(ntd.sweep_param == "epsilon");
    CHECK(ntd.mean == 185.0);
    CHECK(ntd.std == 0.0);
    CHECK(ntd.min == 185.0);
    CHECK(ntd.max == 185.0);
    CHECK(r.stats[1].mean < 185.0);
}

TEST_CASE("bandit arm sweep gives one row per strategy and arm count") {
    auto c = small(Experiment::Bandit);
    c.arms = {2, 4, 6, 8, 10};
    c.runs = 3;
    const auto r = run_experiment(c);
    CHECK(r.stats.size() == 20);
    CHECK(r.records.size() == 60);
    for (const auto& s : r.stats) {
        CHECK(s.sweep_param == "arms");
        CHECK(s.runs == 3);
    }
    CHECK(r.stats[0].strategy == "NTD-IND");
    CHECK(r.stats[0].sweep_value == "2");
    CHECK(r.stats[0].mean == 2.0 * 4437);
}

TEST_CASE("summaries agree with the raw records") {
    auto c = small(Experiment::Dbn);
    c.bits = {2, 4};
    const auto r = run_experiment(c);
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& rec : r.records) groups[{rec.strategy, rec.sweep_value}].push_back(rec.steps);
    for (const auto& s : r.stats) {
        const auto& v = groups.at({s.strategy, s.sweep_value});
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        CHECK(std::abs(s.mean - mean) <= 1e-12 * std::max(1.0, mean));
        CHECK(std::abs(s.std - std::sqrt(ss / (n - 1))) <= 1e-12 * std::max(1.0, s.std));
        CHECK(s.ci95 == doctest::Approx(1.96 * s.std / std::sqrt(n)));
    }
}

TEST_CASE("csv output is byte identical across reruns and thread counts") {
    auto c = small(Experiment::Bandit);
    c.arms = {2, 3};
    c.threads = 1;
    const auto one = to_csv(run_experiment(c).stats);
    c.threads = 4;
    const auto four = to_csv(run_experiment(c).stats);
    const auto again = to_csv(run_experiment(c).stats);
    CHECK(one == four);
    CHECK(four == again);
    c.seed = 8;
    CHECK(to_csv(run_experiment(c).stats) != one);
}

TEST_CASE("csv shape") {
    auto c = small(Experiment::Coin);
    c.strategies = {"NTD"};
    c.runs = 5;
    const auto stats = run_experiment(c).stats;
    const auto text = to_csv(stats);
    const auto rows = lines(text);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "experiment,strategy,sweep_param,sweep_value,runs,mean,std,ci95,min,max");
    CHECK(rows[1] == "coin,NTD,epsilon,0.1,5,185,0,0,185,185");

    const auto path = std::filesystem::temp_directory_path() / "mteach_single_cell.csv";
    emit_csv(stats, path);
    CHECK(slurp(path) == text);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(emit_csv({}, path), std::invalid_argument);
    CHECK_THROWS_AS(emit_csv(stats, "/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("summarize rejects empty input") {
    CHECK_THROWS_AS(summarize("coin", "NTD", "epsilon", "0.1", 0.1, std::vector<double>{}), std::invalid_argument);
    const std::vector<double> one = {3.0};
    const auto s = summarize("coin", "NTD", "epsilon", "0.1", 0.1, one);
    CHECK(s.std == 0.0);
    CHECK(s.mean == 3.0);
}

TEST_CASE("numbers print in shortest round-trip form") {
    CHECK(format_number(185.0) == "185");
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("scaling fits") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {3, 5, 7, 9, 11};
    const auto fit = fit_scaling(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_scaling(std::vector<double>{1, 1}, std::vector<double>{1, 2}), std::invalid_argument);

    auto c = small(Experiment::Coin);
    c.strategies = {"NTD"};
    c.runs = 1;
    c.epsilons = parse_epsilon_sweep("0.0166:0.1:6");
    const auto stats = run_experiment(c).stats;
    std::vector<double> inv;
    std::vector<double> inv_sq;
    std::vector<double> means;
    for (const auto& s : stats) {
        inv.push_back(1.0 / s.sweep_numeric);
        inv_sq.push_back(1.0 / (s.sweep_numeric * s.sweep_numeric));
        means.push_back(s.mean);
    }
    const auto linear = fit_scaling(stats, "NTD");
    const auto quadratic = fit_scaling(inv_sq, means);
    CHECK(linear.r_squared == doctest::Approx(fit_scaling(inv, means).r_squared));
    CHECK(quadratic.r_squared > 0.9999);
    CHECK(1.0 - linear.r_squared > 10 * (1.0 - quadratic.r_squared));
    CHECK_THROWS_AS(fit_scaling(stats, "NSTD"), std::invalid_argument);
}

TEST_CASE("strategies must belong to the experiment") {
    auto c = small(Experiment::Coin);
    c.strategies = {"NSTD-PAR"};
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    c = small(Experiment::Taxi);
    c.epsilons = {0.1};
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    c = small(Experiment::BitflipSeq);
    c.bits = {4};
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    c = small(Experiment::Bandit);
    c.epsilons = {0.1, 0.2};
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
    CHECK_THROWS_AS(parse_experiment("poker"), std::invalid_argument);
    CHECK(parse_experiment("bitflip-seq") == Experiment::BitflipSeq);
}

TEST_CASE("taxi and sequential experiments run") {
    auto taxi = small(Experiment::Taxi);
    taxi.runs = 1;
    taxi.action_sets = {"pickup"};
    const auto t = run_experiment(taxi);
    REQUIRE(t.stats.size() == 2);
    CHECK(t.stats[0].sweep_param == "action_set");
    CHECK(t.stats[1].mean < t.stats[0].mean);
    for (const auto& r : t.records) CHECK(r.error == 0.0);

    auto seq = small(Experiment::BitflipSeq);
    seq.bits = {5};
    seq.stochastic_bits = {2};
    seq.runs = 2;
    seq.strategies = {"NSTD-PAR", "NSTD-IND"};
    const auto s = run_experiment(seq);
    CHECK(s.stats.size() == 2);
    CHECK(s.stats[0].sweep_value == "5");
}

TEST_CASE("experiment configs round trip through json") {
    ExperimentConfig c;
    c.experiment = Experiment::Bandit;
    c.strategies = {"NSTD-IND"};
    c.epsilons = {0.05, 0.1};
    c.arms = {3};
    c.bandit_means = {0.1, 0.2, 0.3};
    c.runs = 12;
    c.seed = 99;
    c.taxi.preconditions = {{TaxiSchema::Up, {"ClearN(a0)"}}};
    const auto j = config_to_json(c);
    const auto back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.arms == c.arms);
    CHECK(back.epsilons == c.epsilons);

    const auto path = std::filesystem::temp_directory_path() / "mteach_config.json";
    {
        std::ofstream f(path);
        f << R"({"experiment": "coin", "epsilon_sweep": "0.05:0.1:3", "runs": 4})";
    }
    const auto loaded = load_config(path);
    CHECK(loaded.experiment == Experiment::Coin);
    CHECK(loaded.epsilons.size() == 3);
    CHECK(loaded.runs == 4);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"experiment", "coin"}, {"epsilonz", 0.1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"experiment", "coin"}, {"epsilon", 0.1}, {"epsilons", {0.2}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST_CASE("concepts round trip through json") {
    const MonotoneConjunction conj(5, {0, 3});
    CHECK(conjunction_from_json(to_json(conj)) == conj);
    CHECK(bernoulli_from_json(to_json(BernoulliConcept(0.3))).p_star == 0.3);
    CHECK(bandit_from_json(to_json(BanditConcept({0.1, 0.9}))).mean == std::vector<double>{0.1, 0.9});
    const std::vector<double> p = {0.2, 0.7, 0.4};
    const DbnConcept dbn = make_bitflip_dbn(p);
    const DbnConcept back = dbn_from_json(to_json(dbn));
    CHECK(back.structure() == dbn.structure());
    CHECK(back.cpt() == dbn.cpt());
    TaxiConfig taxi;
    taxi.taxi_start = {1, 3};
    const TaxiConfig tb = taxi_config_from_json(to_json(taxi));
    CHECK(tb.taxi_start == taxi.taxi_start);
    CHECK(tb.landmarks == taxi.landmarks);
    CHECK_THROWS_AS(bernoulli_from_json(nlohmann::json{{"p_star", 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(conjunction_from_json(nlohmann::json{{"n", 3}}), std::invalid_argument);
}
