#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mteach/harness.hpp"
#include "mteach/mdp_teaching.hpp"
#include "mteach/supervised_teachers.hpp"

using namespace mteach;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " FAILED(" << what << ")";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const TrialStats& row(const std::vector<TrialStats>& stats, const std::string& strategy, const std::string& value) {
    for (const auto& s : stats) {
        if (s.strategy == strategy && s.sweep_value == value) return s;
    }
    throw std::logic_error("missing row " + strategy + " @ " + value);
}

std::vector<double> eps_inverse_grid() { return {1.0 / 10, 1.0 / 20, 1.0 / 30, 1.0 / 40, 1.0 / 50, 1.0 / 60}; }

ExperimentConfig coin_sweep_config() {
    ExperimentConfig c;
    c.experiment = Experiment::Coin;
    c.epsilons = eps_inverse_grid();
    c.delta = 0.05;
    c.coin_bias = 0.5;
    c.runs = 1000;
    c.seed = 2011;
    return c;
}

ExperimentConfig bandit_config() {
    ExperimentConfig c;
    c.experiment = Experiment::Bandit;
    c.epsilons = {1.0 / 45};
    c.delta = 0.05;
    c.arms = {2, 4, 6, 8, 10};
    c.runs = 1000;
    c.seed = 2011;
    return c;
}

ExperimentConfig dbn_config() {
    ExperimentConfig c;
    c.experiment = Experiment::Dbn;
    c.epsilons = {0.3};
    c.delta = 0.05;
    c.bits = {2, 4, 6, 8};
    c.runs = 500;
    c.seed = 2011;
    return c;
}

ExperimentConfig taxi_config() {
    ExperimentConfig c;
    c.experiment = Experiment::Taxi;
    c.runs = 1;
    return c;
}

ExperimentConfig bitflip_seq_config(std::vector<std::string> strategies, std::size_t runs) {
    ExperimentConfig c;
    c.experiment = Experiment::BitflipSeq;
    c.strategies = std::move(strategies);
    c.epsilons = {0.3};
    c.delta = 0.05;
    c.bits = {10};
    c.stochastic_bits = {5, 8};
    c.stochastic_p = 0.5;
    c.runs = runs;
    c.seed = 2011;
    return c;
}

// 1 ---------------------------------------------------------------------------------

void ntd_coin_exactness(Verdict& v) {
    ExperimentConfig c;
    c.experiment = Experiment::Coin;
    c.strategies = {"NTD"};
    c.epsilons = {0.05, 0.1, 0.2};
    c.runs = 1000;
    c.seed = 2011;
    const auto r = run_experiment(c);
    const std::map<std::string, double> expected = {{"0.05", 738}, {"0.1", 185}, {"0.2", 47}};
    for (const auto& [eps, h] : expected) {
        const auto& s = row(r.stats, "NTD", eps);
        v.detail << " eps=" << eps << ":" << s.mean;
        v.require(s.min == h && s.max == h && s.std == 0.0, "eps " + eps + " not exactly " + format_number(h));
    }
    for (const auto& rec : r.records) {
        v.require(rec.steps == expected.at(rec.sweep_value), "trial " + std::to_string(rec.trial) + " deviates");
        if (!v.pass) break;
    }
}

// 2 ---------------------------------------------------------------------------------

void nstd_coin_scaling(Verdict& v) {
    const auto t0 = Clock::now();
    const auto r = run_experiment(coin_sweep_config());
    const double elapsed = seconds_since(t0);
    for (const auto& s : r.stats) {
        if (s.strategy != "NSTD") continue;
        const auto& ntd = row(r.stats, "NTD", s.sweep_value);
        v.require(s.mean < ntd.mean, "NSTD not below NTD at eps " + s.sweep_value);
    }
    const auto fit = fit_scaling(r.stats, "NSTD");
    v.detail << " r2=" << fit.r_squared << " slope=" << fit.slope;
    v.require(fit.r_squared >= 0.95, "linear fit r2 < 0.95");
    const std::string last = format_number(1.0 / 60);
    const double ratio = row(r.stats, "NSTD", last).mean / row(r.stats, "NTD", last).mean;
    v.detail << " nstd/ntd@1/60=" << ratio << " time=" << elapsed << "s";
    v.require(ratio < 0.10, "NSTD at 1/60 not below 10% of NTD");
    v.require(elapsed <= 60.0, "runtime over 60 s");
}

// 3 ---------------------------------------------------------------------------------

void learner_guarantee(Verdict& v) {
    ExperimentConfig c;
    c.experiment = Experiment::Coin;
    c.strategies = {"NSTD"};
    c.epsilons = {0.1};
    c.runs = 1000;
    c.seed = 2011;
    const auto r = run_experiment(c);
    std::size_t good = 0;
    for (const auto& rec : r.records) good += rec.error <= 0.1 ? 1 : 0;
    const double frac = static_cast<double>(good) / static_cast<double>(r.records.size());
    v.detail << " fraction within eps=" << frac;
    v.require(frac >= 0.95, "fraction below 1 - delta");
}

// 4 ---------------------------------------------------------------------------------

void bandit_strategies(Verdict& v) {
    const auto t0 = Clock::now();
    const auto r = run_experiment(bandit_config());
    const double elapsed = seconds_since(t0);
    const std::map<std::string, double> ntd_ind = {
        {"2", 8874}, {"4", 20556}, {"6", 33300}, {"8", 46728}, {"10", 60670}};
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (const auto& k : {"2", "4", "6", "8", "10"}) {
        const auto& ntd = row(r.stats, "NTD-IND", k);
        const auto& ind = row(r.stats, "NSTD-IND", k);
        const auto& par = row(r.stats, "NSTD-PAR", k);
        v.require(ntd.min == ntd_ind.at(k) && ntd.max == ntd_ind.at(k), std::string("NTD-IND count at k=") + k);
        v.require(ind.mean < ntd.mean, std::string("NSTD-IND not below NTD-IND at k=") + k);
        const double ratio = par.mean / ind.mean;
        v.detail << " k=" << k << ":ind=" << ind.mean << ",par=" << par.mean << ",ratio=" << ratio;
        v.require(ratio < prev_ratio, std::string("PAR/IND ratio not decreasing at k=") + k);
        prev_ratio = ratio;
    }
    v.detail << " time=" << elapsed << "s";
    v.require(elapsed <= 120.0, "runtime over 120 s");
}

// 5 ---------------------------------------------------------------------------------

void dbn_supervised(Verdict& v) {
    const auto t0 = Clock::now();
    const auto r = run_experiment(dbn_config());
    const double elapsed = seconds_since(t0);
    const std::map<std::string, double> ntd_count = {{"2", 98}, {"4", 452}, {"6", 1097}, {"8", 2051}};
    for (const auto& [n, h] : ntd_count) {
        const auto& ntd = row(r.stats, "NTD", n);
        const auto& par = row(r.stats, "NSTD-PAR", n);
        const auto& ind = row(r.stats, "NSTD-IND", n);
        v.detail << " n=" << n << ":ind=" << ind.mean << ",par=" << par.mean << ",ntd=" << ntd.mean;
        v.require(ntd.min == h && ntd.max == h, "NTD count at n=" + n);
        v.require(ind.mean < par.mean && par.mean < ntd.mean, "ordering at n=" + n);
    }
    v.detail << " time=" << elapsed << "s";
    v.require(elapsed <= 120.0, "runtime over 120 s");
}

// 6 ---------------------------------------------------------------------------------

void conjunction_oracles(Verdict& v) {
    std::size_t checked = 0;
    for (std::size_t n = 1; n <= 8 && v.pass; ++n) {
        for (std::uint64_t r = 0; r < (1ULL << n) && v.pass; ++r) {
            const MonotoneConjunction c(n, r);
            const auto examples = teach_conjunction_td(c);
            v.require(examples.size() == 1 + c.relevant_indices().size(), "TD list size");
            // Brute-force version space over every conjunction of width n.
            std::vector<std::uint64_t> survivors;
            for (std::uint64_t h = 0; h < (1ULL << n); ++h) {
                const MonotoneConjunction hyp(n, h);
                bool ok = true;
                for (const auto& e : examples) ok = ok && conjunction_label(hyp, e.input) == e.label;
                if (ok) survivors.push_back(h);
            }
            v.require(survivors == std::vector<std::uint64_t>{r}, "brute-force version space not {c}");
            VersionSpace vs(n);
            for (const auto& e : examples) vs.apply(e);
            v.require(vs.unique() == std::optional<MonotoneConjunction>(c), "learner version space not {c}");
            v.require(std_infer(teach_conjunction_std(c)) == c, "STD round trip");
            ++checked;
        }
    }
    v.detail << " conjunctions=" << checked;
}

// 7 ---------------------------------------------------------------------------------

void deterministic_dbn(Verdict& v) {
    std::mt19937_64 gen(2011);
    std::size_t taught = 0;
    for (std::size_t n = 1; n <= 16; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<std::size_t>> parents;
            std::vector<std::vector<double>> cpt;
            for (std::size_t i = 0; i < n; ++i) {
                parents.push_back({static_cast<std::size_t>(gen() % n)});
                cpt.push_back({static_cast<double>(gen() % 2), static_cast<double>(gen() % 2)});
            }
            const DbnConcept dbn(parents, cpt);
            const BitString base(n, gen() & low_bits(n));
            const auto probes = teach_dbn_deterministic(dbn, base);
            v.require(probes.size() == 2, "probe count");
            v.require(probes[0] == base && probes[1] == base.complement(), "probes are not string and complement");
            RandomSource rng(2011, n * 100 + static_cast<std::size_t>(trial));
            std::vector<std::pair<BitString, BitString>> transitions;
            for (const auto& x : probes) transitions.emplace_back(x, dbn_sample_next(dbn, x, rng));
            v.require(learn_deterministic_dbn(parents, transitions).cpt() == dbn.cpt(), "learned CPT differs");
            ++taught;
        }
    }
    v.detail << " dbns=" << taught;
}

// 8 ---------------------------------------------------------------------------------

void taxi_table(Verdict& v) {
    const auto t0 = Clock::now();
    const auto r = run_experiment(taxi_config());
    const double elapsed = seconds_since(t0);
    const std::map<std::string, double> reference = {
        {"pickup", 20}, {"pickup-dropoff", 23}, {"movement", 37}, {"all", 63}};
    for (const auto& rec : r.records) {
        v.require(rec.error == 0.0, rec.strategy + " did not recover " + rec.sweep_value);
    }
    for (const auto& [set, ref] : reference) {
        const double td = row(r.stats, "TD", set).mean;
        const double stda = row(r.stats, "STD", set).mean;
        v.detail << " " << set << ":" << td << "/" << stda << "(ref " << ref << ")";
        v.require(stda < td, "STD not below TD for " + set);
        v.require(std::abs(td - ref) <= 0.5 * ref, "TD outside 50% of reference for " + set);
    }
    v.detail << " time=" << elapsed << "s";
    v.require(elapsed <= 30.0, "runtime over 30 s");
}

// 9 ---------------------------------------------------------------------------------

void sequential_bitflip(Verdict& v) {
    const auto t0 = Clock::now();
    const auto nstd = run_experiment(bitflip_seq_config({"NSTD-PAR", "NSTD-IND"}, 300));
    const auto ntd = run_experiment(bitflip_seq_config({"NTD-PAR"}, 100));
    const double elapsed = seconds_since(t0);
    const double par = row(nstd.stats, "NSTD-PAR", "10").mean;
    const double ind = row(nstd.stats, "NSTD-IND", "10").mean;
    const double full = row(ntd.stats, "NTD-PAR", "10").mean;
    v.detail << " nstd-par=" << par << " nstd-ind=" << ind << " ntd-par=" << full << " ratio=" << full / par
             << " time=" << elapsed << "s";
    v.require(par < ind && ind < full, "ordering NSTD-PAR < NSTD-IND < NTD-PAR");
    v.require(full / par >= 10.0, "NTD-PAR/NSTD-PAR below 10");
    v.require(elapsed <= 120.0, "runtime over 120 s");
}

// 10 --------------------------------------------------------------------------------

Mdp random_deterministic_mdp(std::size_t states, std::size_t actions, std::mt19937_64& gen) {
    Mdp m(states, actions, 0);
    for (StateId s = 0; s < states; ++s) {
        for (ActionId a = 0; a < actions; ++a) {
            const StateId next = a == 0 ? static_cast<StateId>((s + 1) % states) : static_cast<StateId>(gen() % states);
            m.set_transitions(s, a, {{next, 1.0}});
        }
    }
    return m;
}

std::uint64_t optimal_tour(const Mdp& m, StateId start, const std::vector<TeachingTarget>& targets) {
    std::vector<std::size_t> perm(targets.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    do {
        std::uint64_t len = 0;
        StateId cur = start;
        for (std::size_t i : perm) {
            const StateId goal = targets[i].state;
            len += shortest_path_deterministic(m, cur, [&](StateId s) { return s == goal; }).actions.size() + 1;
            cur = m.transitions(goal, targets[i].action).front().next;
        }
        best = std::min(best, len);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void planner_oracles(Verdict& v) {
    std::mt19937_64 gen(2011);
    for (int trial = 0; trial < 50; ++trial) {
        const Mdp m = random_deterministic_mdp(15, 3, gen);
        const auto goal = static_cast<StateId>(gen() % 15);
        const auto plan = expected_steps_planner(m, [&](StateId s) { return s == goal; });
        for (StateId s = 0; s < 15; ++s) {
            const auto path = shortest_path_deterministic(m, s, [&](StateId x) { return x == goal; });
            v.require(plan.expected_steps[s] == static_cast<double>(path.actions.size()), "VI differs from BFS");
        }
    }
    for (double q : {0.9, 0.5, 0.2, 0.05}) {
        Mdp m(2, 1, 0);
        m.set_transitions(0, 0, {{0, 1.0 - q}, {1, q}});
        const auto plan = expected_steps_planner(m, [](StateId s) { return s == 1; });
        v.require(std::abs(plan.expected_steps[0] - 1.0 / q) <= 1e-6, "geometric chain not 1/q");
    }
    double worst = 1.0;
    double total = 0.0;
    const int tours = 30;
    for (int trial = 0; trial < tours; ++trial) {
        const Mdp m = random_deterministic_mdp(12, 3, gen);
        std::vector<TeachingTarget> targets;
        const std::size_t count = 1 + gen() % 7;
        while (targets.size() < count) {
            const auto s = static_cast<StateId>(gen() % 12);
            const auto a = static_cast<ActionId>(gen() % 3);
            const bool dup = std::any_of(targets.begin(), targets.end(),
                                         [&](const TeachingTarget& t) { return t.state == s && t.action == a; });
            if (!dup) targets.push_back({s, a, {targets.size()}});
        }
        const auto tour = greedy_tour(m, 0, targets);
        std::vector<std::size_t> order = tour.order;
        std::sort(order.begin(), order.end());
        std::vector<std::size_t> all(targets.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        v.require(order == all, "tour skipped a target");
        const double ratio = static_cast<double>(tour.length) / static_cast<double>(optimal_tour(m, 0, targets));
        worst = std::max(worst, ratio);
        total += ratio;
    }
    v.detail << " tour ratio mean=" << total / tours << " worst=" << worst;
}

// 11 --------------------------------------------------------------------------------

void coin_direction(Verdict& v) {
    for (double p : {0.8, 0.2}) {
        const int bias = p > 0.5 ? 1 : 0;
        for (int first : {0, 1}) {
            for (int second : {0, 1}) {
                const std::vector<int> script = {first, second};
                std::size_t next = 0;
                const auto demo = nsstd_coin_direction(BernoulliConcept(p), [&] { return script.at(next++); });
                v.require(demo.flips.size() <= 2, "sequence longer than 2");
                v.require(demo.flips.size() == (first == bias ? 1u : 2u), "wrong stopping point");
                v.require(demo.inferred == bias, "wrong inference");
            }
        }
    }
    v.detail << " cases=4";
}

// 12 --------------------------------------------------------------------------------

void determinism(Verdict& v) {
    auto small_seq = bitflip_seq_config({"NTD-PAR", "NSTD-PAR", "NSTD-IND"}, 10);
    const std::vector<std::pair<std::string, ExperimentConfig>> configs = {
        {"coin", coin_sweep_config()}, {"bandit", bandit_config()}, {"dbn", dbn_config()},
        {"taxi", taxi_config()},       {"bitflip-seq", small_seq}};
    for (auto [name, c] : configs) {
        c.threads = 1;
        const auto first = to_csv(run_experiment(c).stats);
        c.threads = 3;
        const auto second = to_csv(run_experiment(c).stats);
        v.require(first == second, name + " CSV differs between runs");
        v.detail << " " << name << ":" << first.size() << "B";
    }
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Verdict&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-12)")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria = {
        {1, "NTD coin exactness", ntd_coin_exactness},
        {2, "NSTD coin scaling", nstd_coin_scaling},
        {3, "learner guarantee", learner_guarantee},
        {4, "bandit strategies", bandit_strategies},
        {5, "DBN supervised teaching", dbn_supervised},
        {6, "conjunction oracles", conjunction_oracles},
        {7, "deterministic DBN", deterministic_dbn},
        {8, "Taxi preconditions", taxi_table},
        {9, "sequential Bitflip", sequential_bitflip},
        {10, "planner oracles", planner_oracles},
        {11, "coin direction", coin_direction},
        {12, "determinism", determinism},
    };

    bool all_pass = true;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        Verdict v;
        try {
            c.run(v);
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " exception: " << e.what();
        }
        all_pass = all_pass && v.pass;
        std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title << ";"
                  << v.detail.str() << std::endl;
    }
    return all_pass ? 0 : 1;
}
