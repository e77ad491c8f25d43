#include "mteach/supervised_teachers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace mteach {

StopRule::StopRule(double half_width_, std::uint64_t cap_) : half_width(half_width_), cap(cap_) {
    if (!(half_width > 0.0)) throw std::invalid_argument("stop rule half-width must be positive");
    if (cap < 1) throw std::invalid_argument("stop rule cap must be at least 1");
}

bool StopRule::within(const Tally& t, double truth) const {
    if (t.count == 0) return false;
    // The slack absorbs rounding at the closed boundary.
    return std::abs(t.mean() - truth) <= half_width + 1e-12;
}

// Conjunctions ---------------------------------------------------------------

std::vector<Example> teach_conjunction_td(const MonotoneConjunction& c) {
    std::vector<Example> out;
    const BitString positive(c.size(), c.relevant());
    out.push_back({positive, 1});
    for (std::size_t i : c.relevant_indices()) {
        BitString negative = positive;
        negative.set(i, false);
        out.push_back({negative, 0});
    }
    return out;
}

Example teach_conjunction_std(const MonotoneConjunction& c) { return {BitString(c.size(), c.relevant()), 1}; }

MonotoneConjunction std_infer(const Example& e) {
    if (e.label != 1) throw std::invalid_argument("subset-teaching learner expects a positive example");
    return MonotoneConjunction(e.input.size(), e.input.mask());
}

// Coins ------------------------------------------------------------------------

namespace {

constexpr Input kCoinInput = 0;

// The collection is an unordered multiset, so per-parameter tallies can be
// accumulated locally and handed over in one batch.
void deliver(TeachingOutcome& out, Input input, const Tally& t) {
    if (t.count == 0) return;
    out.collection.add(input, 1, t.successes);
    out.collection.add(input, 0, t.count - t.successes);
    out.estimate.add(input, t);
    out.per_condition_steps[input] += t.count;
    out.samples += t.count;
}

}  // namespace

TeachingOutcome teach_coin_ntd(const BernoulliConcept& c, const AccuracyParams& params, RandomSource& rng) {
    TeachingOutcome out;
    const std::uint64_t m = hoeffding_samples(params);
    Tally t;
    for (std::uint64_t i = 0; i < m; ++i) t.record(bernoulli_sample(c.p_star, rng) == 1);
    deliver(out, kCoinInput, t);
    out.steps = m;
    return out;
}

TeachingOutcome teach_coin_nstd(const BernoulliConcept& c, const AccuracyParams& params, RandomSource& rng) {
    TeachingOutcome out;
    const StopRule rule(params.epsilon() / 2.0, hoeffding_samples(params));
    Tally t;
    do {
        t.record(bernoulli_sample(c.p_star, rng) == 1);
    } while (!rule.satisfied(t, c.p_star));
    deliver(out, kCoinInput, t);
    out.steps = t.count;
    out.stopped_early = t.count < rule.cap;
    return out;
}

// Bandits ----------------------------------------------------------------------

std::string_view to_string(BanditStrategy s) {
    switch (s) {
        case BanditStrategy::NtdInd: return "NTD-IND";
        case BanditStrategy::NstdInd: return "NSTD-IND";
        case BanditStrategy::NtdPar: return "NTD-PAR";
        case BanditStrategy::NstdPar: return "NSTD-PAR";
    }
    return "?";
}

BanditStrategy parse_bandit_strategy(std::string_view name) {
    for (auto s : {BanditStrategy::NtdInd, BanditStrategy::NstdInd, BanditStrategy::NtdPar, BanditStrategy::NstdPar}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown bandit strategy '" + std::string(name) + "'");
}

TeachingOutcome teach_bandit(BanditStrategy strategy, const BanditConcept& c, const AccuracyParams& params,
                             RandomSource& rng, std::span<const std::size_t> arm_order) {
    const std::size_t k = c.arms();
    const AccuracyParams per_arm(params.epsilon(), params.delta() / static_cast<double>(k));
    const std::uint64_t m = hoeffding_samples(per_arm);
    const StopRule rule(params.epsilon() / 2.0, m);

    std::vector<std::size_t> order(k);
    if (arm_order.empty()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
    } else {
        if (arm_order.size() != k) throw std::invalid_argument("arm order must list every arm once");
        order.assign(arm_order.begin(), arm_order.end());
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < k; ++i) {
            if (sorted[i] != i) throw std::invalid_argument("arm order must be a permutation");
        }
    }

    TeachingOutcome out;
    std::vector<Tally> tally(k);
    auto pull = [&](std::size_t arm) { tally[arm].record(bernoulli_sample(c.mean[arm], rng) == 1); };

    switch (strategy) {
        case BanditStrategy::NtdInd:
            for (std::size_t arm : order) {
                for (std::uint64_t i = 0; i < m; ++i) pull(arm);
            }
            out.steps = k * m;
            break;
        case BanditStrategy::NstdInd:
            for (std::size_t arm : order) {
                do {
                    pull(arm);
                } while (!rule.satisfied(tally[arm], c.mean[arm]));
                out.steps += tally[arm].count;
            }
            out.stopped_early = out.steps < k * m;
            break;
        case BanditStrategy::NtdPar:
            for (std::uint64_t i = 0; i < m; ++i) {
                for (std::size_t arm = 0; arm < k; ++arm) pull(arm);
                ++out.steps;
            }
            break;
        case BanditStrategy::NstdPar:
            while (true) {
                for (std::size_t arm = 0; arm < k; ++arm) pull(arm);
                ++out.steps;
                if (out.steps >= m) break;
                // Arms that were accurate earlier can drift out again, so
                // every arm is re-checked after every pull.
                bool all_within = true;
                for (std::size_t arm = 0; arm < k && all_within; ++arm) {
                    all_within = rule.within(tally[arm], c.mean[arm]);
                }
                if (all_within) break;
            }
            out.stopped_early = out.steps < m;
            break;
    }
    for (std::size_t arm = 0; arm < k; ++arm) deliver(out, arm, tally[arm]);
    return out;
}

// DBNs -------------------------------------------------------------------------

std::string_view to_string(DbnStrategy s) {
    switch (s) {
        case DbnStrategy::Ntd: return "NTD";
        case DbnStrategy::NstdPar: return "NSTD-PAR";
        case DbnStrategy::NstdInd: return "NSTD-IND";
    }
    return "?";
}

DbnStrategy parse_dbn_strategy(std::string_view name) {
    for (auto s : {DbnStrategy::Ntd, DbnStrategy::NstdPar, DbnStrategy::NstdInd}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown DBN strategy '" + std::string(name) + "'");
}

DbnProbePlan bitflip_probe_plan(const DbnConcept& bitflip) {
    const std::size_t n = bitflip.size();
    DbnProbePlan plan;
    plan.parallel_probe = BitString(n);
    for (std::size_t i = 0; i < n; i += 2) plan.parallel_probe.set(i, true);
    for (std::size_t i = 0; i < n; ++i) plan.parallel_targets.push_back(bitflip.condition_at(i, plan.parallel_probe));
    for (std::size_t j = 0; j < n; ++j) {
        BitString probe(n, low_bits(n) & ~low_bits(j));
        plan.individual.push_back({probe, bitflip.condition_at(j, probe)});
    }
    plan.confidence_arity = bitflip.k_par();
    return plan;
}

void validate_probe_plan(const DbnConcept& c, const DbnProbePlan& plan) {
    if (plan.parallel_targets.empty() && plan.individual.empty()) {
        throw unteachable_under_plan("probe plan names no conditions to teach");
    }
    std::set<DbnCondition> targets(plan.parallel_targets.begin(), plan.parallel_targets.end());
    for (const auto& ind : plan.individual) targets.insert(ind.target);

    if (!plan.parallel_targets.empty()) {
        if (plan.parallel_probe.size() != c.size()) throw unteachable_under_plan("parallel probe has the wrong width");
        for (const auto& t : plan.parallel_targets) {
            if (c.condition_at(t.factor, plan.parallel_probe) != t) {
                throw unteachable_under_plan("parallel probe never exercises a condition of factor " +
                                             std::to_string(t.factor));
            }
        }
    }
    for (const auto& ind : plan.individual) {
        if (ind.probe.size() != c.size()) throw unteachable_under_plan("individual probe has the wrong width");
        if (c.condition_at(ind.target.factor, ind.probe) != ind.target) {
            throw unteachable_under_plan("individual probe misses its condition on factor " +
                                         std::to_string(ind.target.factor));
        }
        for (std::size_t f = 0; f < c.size(); ++f) {
            if (f == ind.target.factor) continue;
            if (targets.count(c.condition_at(f, ind.probe)) != 0) {
                throw unteachable_under_plan("individual probe for factor " + std::to_string(ind.target.factor) +
                                             " also exposes an untaught condition of factor " + std::to_string(f));
            }
        }
    }
}

AccuracyParams dbn_condition_params(const AccuracyParams& params, std::size_t n, std::size_t confidence_arity) {
    const double nn = static_cast<double>(n);
    return AccuracyParams(params.epsilon() / nn, params.delta() / std::pow(nn, static_cast<double>(confidence_arity)));
}

TeachingOutcome teach_dbn(DbnStrategy strategy, const DbnConcept& c, const DbnProbePlan& plan,
                          const AccuracyParams& params, RandomSource& rng) {
    validate_probe_plan(c, plan);
    const std::size_t n = c.size();
    const std::uint64_t m = hoeffding_samples(dbn_condition_params(params, n, plan.confidence_arity));
    const StopRule rule(params.epsilon() / (2.0 * static_cast<double>(n)), m);

    TeachingOutcome out;
    std::map<DbnCondition, Tally> tally;
    auto probe = [&](const BitString& input) {
        const BitString next = dbn_sample_next(c, input, rng);
        for (std::size_t f = 0; f < n; ++f) {
            const DbnCondition cond = c.condition_at(f, input);
            tally[cond].record(next[f]);
        }
        ++out.steps;
    };
    auto within = [&](const DbnCondition& t) { return rule.within(tally[t], c.probability(t)); };

    switch (strategy) {
        case DbnStrategy::Ntd:
            if (plan.parallel_targets.empty()) throw unteachable_under_plan("plan has no parallel probe");
            for (std::uint64_t i = 0; i < m; ++i) probe(plan.parallel_probe);
            break;
        case DbnStrategy::NstdPar:
            if (plan.parallel_targets.empty()) throw unteachable_under_plan("plan has no parallel probe");
            while (true) {
                probe(plan.parallel_probe);
                if (out.steps >= m) break;
                if (std::all_of(plan.parallel_targets.begin(), plan.parallel_targets.end(), within)) break;
            }
            out.stopped_early = out.steps < m;
            break;
        case DbnStrategy::NstdInd:
            if (plan.individual.empty()) throw unteachable_under_plan("plan has no individual probes");
            for (const auto& ind : plan.individual) {
                do {
                    probe(ind.probe);
                } while (!rule.satisfied(tally[ind.target], c.probability(ind.target)));
            }
            out.stopped_early = out.steps < m * plan.individual.size();
            break;
    }
    for (const auto& [cond, t] : tally) deliver(out, condition_key(cond), t);
    return out;
}

std::vector<BitString> teach_dbn_deterministic(const DbnConcept& c, const BitString& base) {
    if (base.size() != c.size()) throw std::invalid_argument("base probe width does not match DBN");
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.parents(i).size() != 1) {
            throw std::invalid_argument("two-probe teaching needs exactly one parent per factor");
        }
        for (std::uint32_t a = 0; a < 2; ++a) {
            if (!c.is_deterministic({i, a})) throw std::invalid_argument("two-probe teaching needs a deterministic DBN");
        }
    }
    return {base, base.complement()};
}

DbnConcept learn_deterministic_dbn(const std::vector<std::vector<std::size_t>>& structure,
                                   const std::vector<std::pair<BitString, BitString>>& transitions) {
    const std::size_t n = structure.size();
    std::vector<std::vector<double>> cpt(n);
    std::vector<std::vector<bool>> seen(n);
    for (std::size_t i = 0; i < n; ++i) {
        cpt[i].assign(std::size_t{1} << structure[i].size(), 0.0);
        seen[i].assign(cpt[i].size(), false);
    }
    for (const auto& [state, next] : transitions) {
        if (state.size() != n || next.size() != n) throw std::invalid_argument("transition width does not match DBN");
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t a = 0;
            for (std::size_t j = 0; j < structure[i].size(); ++j) {
                if (state[structure[i][j]]) a |= 1U << j;
            }
            const double value = next[i] ? 1.0 : 0.0;
            if (seen[i][a] && cpt[i][a] != value) {
                throw inconsistent_samples("transitions contradict a deterministic DBN");
            }
            cpt[i][a] = value;
            seen[i][a] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < seen[i].size(); ++a) {
            if (!seen[i][a]) {
                throw incomplete_teaching("factor " + std::to_string(i) + " condition " + std::to_string(a) +
                                          " was never shown");
            }
        }
    }
    return DbnConcept(structure, std::move(cpt));
}

}  // namespace mteach
