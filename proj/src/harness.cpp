#include "mteach/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "mteach/mdp_teaching.hpp"
#include "mteach/supervised_teachers.hpp"

namespace mteach {

using nlohmann::json;

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Coin: return "coin";
        case Experiment::Bandit: return "bandit";
        case Experiment::Dbn: return "dbn";
        case Experiment::Taxi: return "taxi";
        case Experiment::BitflipSeq: return "bitflip-seq";
    }
    return "?";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::Coin, Experiment::Bandit, Experiment::Dbn, Experiment::Taxi, Experiment::BitflipSeq}) {
        if (to_string(e) == name) return e;
    }
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

std::vector<std::string> default_strategies(Experiment e) {
    switch (e) {
        case Experiment::Coin: return {"NTD", "NSTD"};
        case Experiment::Bandit: return {"NTD-IND", "NSTD-IND", "NTD-PAR", "NSTD-PAR"};
        case Experiment::Dbn: return {"NTD", "NSTD-PAR", "NSTD-IND"};
        case Experiment::Taxi: return {"TD", "STD"};
        case Experiment::BitflipSeq: return {"NTD-PAR", "NSTD-PAR", "NSTD-IND"};
    }
    return {};
}

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig c = *this;
    if (c.strategies.empty()) c.strategies = default_strategies(c.experiment);
    if (c.epsilons.empty()) {
        switch (c.experiment) {
            case Experiment::Coin: c.epsilons = {0.1}; break;
            case Experiment::Bandit: c.epsilons = {1.0 / 45.0}; break;
            case Experiment::Dbn:
            case Experiment::BitflipSeq: c.epsilons = {0.3}; break;
            case Experiment::Taxi: break;
        }
    }
    if (c.runs == 0) {
        switch (c.experiment) {
            case Experiment::Coin:
            case Experiment::Bandit: c.runs = 1000; break;
            case Experiment::Dbn: c.runs = 500; break;
            case Experiment::Taxi: c.runs = 1; break;
            case Experiment::BitflipSeq: c.runs = 100; break;
        }
    }
    if (c.bits.empty()) {
        if (c.experiment == Experiment::Dbn) c.bits = {2, 4, 6, 8};
        if (c.experiment == Experiment::BitflipSeq) c.bits = {10};
    }
    if (!c.bandit_means.empty()) c.arms = {c.bandit_means.size()};
    if (!c.bitflip_p.empty()) c.bits = {c.bitflip_p.size()};
    return c;
}

void ExperimentConfig::validate() const {
    if (runs < 1) throw std::invalid_argument("run count must be at least 1");
    const auto allowed = default_strategies(experiment);
    if (strategies.empty()) throw std::invalid_argument("no strategies selected");
    for (const auto& s : strategies) {
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            throw std::invalid_argument("strategy '" + s + "' does not apply to the " +
                                        std::string(to_string(experiment)) + " experiment");
        }
    }
    if (std::set<std::string>(strategies.begin(), strategies.end()).size() != strategies.size()) {
        throw std::invalid_argument("strategies must not repeat");
    }
    if (experiment == Experiment::Taxi) {
        if (!epsilons.empty()) throw std::invalid_argument("taxi teaching is exact; epsilon does not apply");
        if (action_sets.empty()) throw std::invalid_argument("no taxi action sets selected");
        for (const auto& a : action_sets) taxi_action_set(a);
        TaxiEnv check(taxi);
        (void)check;
        return;
    }
    if (epsilons.empty()) throw std::invalid_argument("no epsilon given");
    for (double e : epsilons) AccuracyParams(e, delta);
    if (std::set<double>(epsilons.begin(), epsilons.end()).size() != epsilons.size()) {
        throw std::invalid_argument("epsilon sweep values must be distinct");
    }
    const bool eps_sweep = epsilons.size() > 1;
    switch (experiment) {
        case Experiment::Coin: BernoulliConcept{coin_bias}; break;
        case Experiment::Bandit:
            if (arms.empty() || std::find(arms.begin(), arms.end(), 0) != arms.end()) {
                throw std::invalid_argument("arm counts must be positive");
            }
            if (!bandit_means.empty()) BanditConcept{bandit_means};
            if (eps_sweep && arms.size() > 1) throw std::invalid_argument("sweep either epsilon or arms, not both");
            break;
        case Experiment::Dbn:
        case Experiment::BitflipSeq:
            if (bits.empty() || std::find(bits.begin(), bits.end(), 0) != bits.end()) {
                throw std::invalid_argument("bit counts must be positive");
            }
            if (eps_sweep && bits.size() > 1) throw std::invalid_argument("sweep either epsilon or bits, not both");
            if (!bitflip_p.empty()) BitflipEnv{bitflip_p};
            if (experiment == Experiment::BitflipSeq) {
                for (std::size_t n : bits) {
                    if (n > 20) throw std::invalid_argument("sequential Bitflip is limited to 20 bits");
                    if (bitflip_p.empty()) {
                        for (std::size_t i : stochastic_bits) {
                            if (i >= n) throw std::invalid_argument("stochastic bit index exceeds the bit count");
                        }
                    }
                }
                if (!(stochastic_p >= 0.0 && stochastic_p <= 1.0)) {
                    throw std::invalid_argument("stochastic shift probability outside [0, 1]");
                }
            } else if (*std::max_element(bits.begin(), bits.end()) > 32) {
                throw std::invalid_argument("DBN experiments are limited to 32 factors");
            }
            break;
        case Experiment::Taxi: break;
    }
    if (threads > 1024) throw std::invalid_argument("thread count is implausibly large");
}

std::vector<double> parse_epsilon_sweep(std::string_view text) {
    const std::string s(text);
    const auto a = s.find(':');
    const auto b = a == std::string::npos ? std::string::npos : s.find(':', a + 1);
    if (b == std::string::npos || s.find(':', b + 1) != std::string::npos) {
        throw std::invalid_argument("epsilon sweep must look like lo:hi:steps");
    }
    double lo = 0.0;
    double hi = 0.0;
    long steps = 0;
    try {
        std::size_t used = 0;
        lo = std::stod(s.substr(0, a), &used);
        if (used != a) throw std::invalid_argument("");
        hi = std::stod(s.substr(a + 1, b - a - 1), &used);
        if (used != b - a - 1) throw std::invalid_argument("");
        steps = std::stol(s.substr(b + 1), &used);
        if (used != s.size() - b - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("epsilon sweep '" + s + "' is not lo:hi:steps");
    }
    if (!(lo > 0.0 && lo < hi && hi < 1.0)) throw std::invalid_argument("epsilon sweep needs 0 < lo < hi < 1");
    if (steps < 2) throw std::invalid_argument("epsilon sweep needs at least 2 steps");
    std::vector<double> out;
    const double inv_hi = 1.0 / hi;
    const double inv_lo = 1.0 / lo;
    for (long i = steps - 1; i >= 0; --i) {
        const double inv = inv_hi + (inv_lo - inv_hi) * static_cast<double>(i) / static_cast<double>(steps - 1);
        out.push_back(1.0 / inv);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

struct SweepPoint {
    std::string value;
    double numeric;
    double epsilon;
    std::size_t arms;
    std::size_t bits;
    std::string action_set;
};

std::string sweep_param(const ExperimentConfig& c) {
    if (c.experiment == Experiment::Taxi) return "action_set";
    if (c.experiment == Experiment::Coin || c.epsilons.size() > 1) return "epsilon";
    return c.experiment == Experiment::Bandit ? "arms" : "bits";
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& c) {
    std::vector<SweepPoint> out;
    const double eps0 = c.epsilons.empty() ? 0.0 : c.epsilons.front();
    const std::size_t arms0 = c.arms.empty() ? 0 : c.arms.front();
    const std::size_t bits0 = c.bits.empty() ? 0 : c.bits.front();
    const std::string param = sweep_param(c);
    if (param == "action_set") {
        for (std::size_t i = 0; i < c.action_sets.size(); ++i) {
            out.push_back({c.action_sets[i], static_cast<double>(i), 0.0, 0, 0, c.action_sets[i]});
        }
    } else if (param == "epsilon") {
        std::vector<double> eps = c.epsilons;
        std::sort(eps.begin(), eps.end());
        for (double e : eps) out.push_back({format_number(e), e, e, arms0, bits0, {}});
    } else {
        std::vector<std::size_t> v = param == "arms" ? c.arms : c.bits;
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t x : v) {
            out.push_back({std::to_string(x), static_cast<double>(x), eps0, param == "arms" ? x : arms0,
                           param == "bits" ? x : bits0, {}});
        }
    }
    return out;
}

struct TrialResult {
    double steps = 0.0;
    double error = 0.0;
};

TrialResult run_trial(const ExperimentConfig& c, const std::string& strategy, const SweepPoint& point,
                      std::size_t trial) {
    // Teaching draws depend on the trial index alone, so every strategy and
    // sweep point of a trial consumes the same stream. Environment draws omit
    // the strategy so every strategy faces the same sampled models.
    RandomSource teach(c.seed, stream_key(hash_tag("teaching"), trial));
    RandomSource world(c.seed, stream_key(hash_tag("environment"), hash_tag(point.value), trial));

    switch (c.experiment) {
        case Experiment::Coin: {
            const BernoulliConcept coin(c.coin_bias);
            const AccuracyParams params(point.epsilon, c.delta);
            const auto out =
                strategy == "NTD" ? teach_coin_ntd(coin, params, teach) : teach_coin_nstd(coin, params, teach);
            return {static_cast<double>(out.steps), std::abs(out.estimate.find(0)->mean() - coin.p_star)};
        }
        case Experiment::Bandit: {
            std::vector<double> means = c.bandit_means;
            if (means.empty()) {
                for (std::size_t i = 0; i < point.arms; ++i) means.push_back(world.uniform());
            }
            const BanditConcept bandit(means);
            const auto out = teach_bandit(parse_bandit_strategy(strategy), bandit, AccuracyParams(point.epsilon, c.delta),
                                          teach);
            return {static_cast<double>(out.steps), aggregate_model_error(out.estimate, bandit)};
        }
        case Experiment::Dbn: {
            std::vector<double> p = c.bitflip_p;
            if (p.empty()) {
                for (std::size_t i = 0; i < point.bits; ++i) p.push_back(world.uniform());
            }
            const DbnConcept dbn = make_bitflip_dbn(p);
            const DbnProbePlan plan = bitflip_probe_plan(dbn);
            const DbnStrategy s = parse_dbn_strategy(strategy);
            const auto out = teach_dbn(s, dbn, plan, AccuracyParams(point.epsilon, c.delta), teach);
            std::vector<DbnCondition> taught = plan.parallel_targets;
            if (s == DbnStrategy::NstdInd) {
                taught.clear();
                for (const auto& ind : plan.individual) taught.push_back(ind.target);
            }
            return {static_cast<double>(out.steps), aggregate_model_error(out.estimate, dbn, taught)};
        }
        case Experiment::Taxi: {
            const TaxiEnv env(c.taxi);
            const auto schemas = taxi_action_set(point.action_set);
            const auto out = strategy == "TD" ? taxi_td_teacher(env, schemas) : taxi_std_approx_teacher(env, schemas);
            return {static_cast<double>(out.sequence.length()), out.exact ? 0.0 : 1.0};
        }
        case Experiment::BitflipSeq: {
            const BitflipEnv env = c.bitflip_p.empty()
                                       ? make_sequential_bitflip(point.bits, c.stochastic_bits, c.stochastic_p)
                                       : BitflipEnv(c.bitflip_p);
            const auto out = teach_bitflip_sequential(env, parse_sequential_strategy(strategy),
                                                      AccuracyParams(point.epsilon, c.delta), teach);
            return {static_cast<double>(out.sequence.length()), out.max_error};
        }
    }
    throw std::logic_error("unhandled experiment");
}

}  // namespace

TrialStats summarize(std::string_view experiment, std::string_view strategy, std::string_view param,
                     std::string_view value, double numeric, std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("cannot summarize zero trials");
    TrialStats s;
    s.experiment = experiment;
    s.strategy = strategy;
    s.sweep_param = param;
    s.sweep_value = value;
    s.sweep_numeric = numeric;
    s.runs = values.size();
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.ci95 = 1.96 * s.std / std::sqrt(n);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    // Rounding can push the mean of identical values one ulp outside them.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config_in) {
    const ExperimentConfig c = config_in.resolved();
    c.validate();
    const auto points = sweep_points(c);
    const std::string param = sweep_param(c);
    const std::size_t cells = c.strategies.size() * points.size();
    const std::size_t jobs = cells * c.runs;

    std::vector<TrialResult> results(jobs);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs) return;
            const std::size_t cell = j / c.runs;
            const std::size_t trial = j % c.runs;
            try {
                results[j] = run_trial(c, c.strategies[cell / points.size()], points[cell % points.size()], trial);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(jobs);
                return;
            }
        }
    };
    unsigned workers = c.threads != 0 ? c.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    ExperimentResult out;
    const std::string experiment(to_string(c.experiment));
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto& strategy = c.strategies[cell / points.size()];
        const auto& point = points[cell % points.size()];
        std::vector<double> steps(c.runs);
        for (std::size_t t = 0; t < c.runs; ++t) {
            const auto& r = results[cell * c.runs + t];
            steps[t] = r.steps;
            out.records.push_back({strategy, point.value, t, r.steps, r.error});
        }
        out.stats.push_back(summarize(experiment, strategy, param, point.value, point.numeric, steps));
    }
    return out;
}

std::string to_csv(const std::vector<TrialStats>& stats) {
    std::string out = "experiment,strategy,sweep_param,sweep_value,runs,mean,std,ci95,min,max\n";
    for (const auto& s : stats) {
        out += s.experiment + ',' + s.strategy + ',' + s.sweep_param + ',' + s.sweep_value + ',' +
               std::to_string(s.runs) + ',' + format_number(s.mean) + ',' + format_number(s.std) + ',' +
               format_number(s.ci95) + ',' + format_number(s.min) + ',' + format_number(s.max) + '\n';
    }
    return out;
}

void emit_csv(const std::vector<TrialStats>& stats, const std::filesystem::path& path) {
    if (stats.empty()) throw std::invalid_argument("no statistics to write");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << to_csv(stats);
    f.flush();
    if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ScalingFit fit_scaling(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
    if (x.size() < 2) throw std::invalid_argument("degenerate sweep: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate sweep: all x values coincide");
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

ScalingFit fit_scaling(const std::vector<TrialStats>& stats, std::string_view strategy) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : stats) {
        if (s.strategy != strategy || s.sweep_param != "epsilon") continue;
        x.push_back(1.0 / s.sweep_numeric);
        y.push_back(s.mean);
    }
    if (x.size() < 4) {
        throw std::invalid_argument("scaling fit needs at least four epsilon sweep points for " +
                                    std::string(strategy));
    }
    return fit_scaling(x, y);
}

// Structured configuration --------------------------------------------------------

namespace {

void require_object(const json& j, std::string_view what, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be an object");
    for (const auto& [k, v] : j.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw std::invalid_argument("unknown field '" + k + "' in " + std::string(what));
        }
    }
}

template <typename T>
T field(const json& j, std::string_view key) {
    const std::string k(key);
    if (!j.contains(k)) throw std::invalid_argument("missing field '" + k + "'");
    try {
        return j.at(k).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument("field '" + k + "' has the wrong type: " + e.what());
    }
}

template <typename T>
void optional_field(const json& j, std::string_view key, T& dst) {
    if (j.contains(std::string(key))) dst = field<T>(j, key);
}

Cell cell_from_json(const json& j) {
    const auto xy = j.get<std::vector<int>>();
    if (xy.size() != 2) throw std::invalid_argument("a cell is [x, y]");
    return {xy[0], xy[1]};
}

json cell_to_json(const Cell& c) { return json::array({c.x, c.y}); }

}  // namespace

json to_json(const MonotoneConjunction& c) {
    return {{"n", c.size()}, {"relevant", c.relevant_indices()}};
}

MonotoneConjunction conjunction_from_json(const json& j) {
    require_object(j, "conjunction", {"n", "relevant"});
    const auto n = field<std::size_t>(j, "n");
    std::uint64_t mask = 0;
    for (std::size_t i : field<std::vector<std::size_t>>(j, "relevant")) {
        if (i >= n || i >= 64) throw std::invalid_argument("relevant variable index out of range");
        mask |= 1ULL << i;
    }
    return MonotoneConjunction(n, mask);
}

json to_json(const BernoulliConcept& c) { return {{"p_star", c.p_star}}; }

BernoulliConcept bernoulli_from_json(const json& j) {
    require_object(j, "coin", {"p_star"});
    return BernoulliConcept(field<double>(j, "p_star"));
}

json to_json(const BanditConcept& c) { return {{"mean", c.mean}}; }

BanditConcept bandit_from_json(const json& j) {
    require_object(j, "bandit", {"mean"});
    return BanditConcept(field<std::vector<double>>(j, "mean"));
}

json to_json(const DbnConcept& c) { return {{"parents", c.structure()}, {"cpt", c.cpt()}}; }

DbnConcept dbn_from_json(const json& j) {
    require_object(j, "dbn", {"parents", "cpt"});
    return DbnConcept(field<std::vector<std::vector<std::size_t>>>(j, "parents"),
                      field<std::vector<std::vector<double>>>(j, "cpt"));
}

json to_json(const TaxiConfig& c) {
    json landmarks = json::array();
    for (const auto& l : c.landmarks) landmarks.push_back(cell_to_json(l));
    json pre = json::object();
    for (const auto& [schema, names] : c.preconditions) pre[std::string(to_string(schema))] = names;
    return {{"width", c.width},
            {"height", c.height},
            {"landmarks", landmarks},
            {"taxi_start", cell_to_json(c.taxi_start)},
            {"passenger_start", c.passenger_start},
            {"destination", c.destination},
            {"preconditions", pre}};
}

TaxiConfig taxi_config_from_json(const json& j) {
    require_object(j, "taxi",
                   {"width", "height", "landmarks", "taxi_start", "passenger_start", "destination", "preconditions"});
    TaxiConfig c;
    try {
        optional_field(j, "width", c.width);
        optional_field(j, "height", c.height);
        if (j.contains("landmarks")) {
            c.landmarks.clear();
            for (const auto& l : j.at("landmarks")) c.landmarks.push_back(cell_from_json(l));
        }
        if (j.contains("taxi_start")) c.taxi_start = cell_from_json(j.at("taxi_start"));
        optional_field(j, "passenger_start", c.passenger_start);
        optional_field(j, "destination", c.destination);
        if (j.contains("preconditions")) {
            for (const auto& [name, preds] : j.at("preconditions").items()) {
                c.preconditions.emplace_back(parse_taxi_schema(name), preds.get<std::vector<std::string>>());
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed taxi config: ") + e.what());
    }
    TaxiEnv check(c);
    (void)check;
    return c;
}

ExperimentConfig config_from_json(const json& j) {
    require_object(j, "experiment config",
                   {"experiment", "strategies", "epsilon", "epsilons", "epsilon_sweep", "delta", "runs", "seed",
                    "coin_bias", "arms", "bandit_means", "bits", "bitflip_p", "stochastic_bits", "stochastic_p",
                    "taxi", "action_sets", "out", "threads"});
    ExperimentConfig c;
    c.experiment = parse_experiment(field<std::string>(j, "experiment"));
    optional_field(j, "strategies", c.strategies);
    const int eps_forms = static_cast<int>(j.contains("epsilon")) + static_cast<int>(j.contains("epsilons")) +
                          static_cast<int>(j.contains("epsilon_sweep"));
    if (eps_forms > 1) throw std::invalid_argument("give only one of epsilon, epsilons, epsilon_sweep");
    if (j.contains("epsilon")) c.epsilons = {field<double>(j, "epsilon")};
    optional_field(j, "epsilons", c.epsilons);
    if (j.contains("epsilon_sweep")) c.epsilons = parse_epsilon_sweep(field<std::string>(j, "epsilon_sweep"));
    optional_field(j, "delta", c.delta);
    optional_field(j, "runs", c.runs);
    optional_field(j, "seed", c.seed);
    optional_field(j, "coin_bias", c.coin_bias);
    optional_field(j, "arms", c.arms);
    optional_field(j, "bandit_means", c.bandit_means);
    optional_field(j, "bits", c.bits);
    optional_field(j, "bitflip_p", c.bitflip_p);
    optional_field(j, "stochastic_bits", c.stochastic_bits);
    optional_field(j, "stochastic_p", c.stochastic_p);
    if (j.contains("taxi")) c.taxi = taxi_config_from_json(j.at("taxi"));
    optional_field(j, "action_sets", c.action_sets);
    optional_field(j, "out", c.out);
    optional_field(j, "threads", c.threads);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    return {{"experiment", std::string(to_string(c.experiment))},
            {"strategies", c.strategies},
            {"epsilons", c.epsilons},
            {"delta", c.delta},
            {"runs", c.runs},
            {"seed", c.seed},
            {"coin_bias", c.coin_bias},
            {"arms", c.arms},
            {"bandit_means", c.bandit_means},
            {"bits", c.bits},
            {"bitflip_p", c.bitflip_p},
            {"stochastic_bits", c.stochastic_bits},
            {"stochastic_p", c.stochastic_p},
            {"taxi", to_json(c.taxi)},
            {"action_sets", c.action_sets},
            {"out", c.out},
            {"threads", c.threads}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

}  // namespace mteach
