#include "mteach/mdp_teaching.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "mteach/supervised_teachers.hpp"

namespace mteach {

namespace {

bool precedes(const TeachingTarget& a, const TeachingTarget& b) {
    return std::tie(a.state, a.action) < std::tie(b.state, b.action);
}

/// Forward BFS distances from `from`; max() marks unreached states.
std::vector<std::uint64_t> bfs_distances(const Mdp& m, StateId from) {
    constexpr auto kFar = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> dist(m.num_states(), kFar);
    std::deque<StateId> frontier{from};
    dist[from] = 0;
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            for (const auto& t : m.transitions(s, a)) {
                if (dist[t.next] != kFar) continue;
                dist[t.next] = dist[s] + 1;
                frontier.push_back(t.next);
            }
        }
    }
    return dist;
}

}  // namespace

std::vector<TeachingTarget> build_teaching_set_greedy(const TeachingProblem& problem, const ReachableSet& reachable) {
    if (reachable.transitions.empty()) throw std::invalid_argument("no reachable experiences to teach from");

    struct Candidate {
        StateId s;
        ActionId a;
        std::vector<std::size_t> informs;
    };
    std::vector<Candidate> candidates;
    for (const auto& t : reachable.transitions) {
        if (!candidates.empty() && candidates.back().s == t.s && candidates.back().a == t.a) continue;
        candidates.push_back({t.s, t.a, problem.informs(t.s, t.a)});
    }

    const std::size_t n = problem.parameter_count();
    std::vector<bool> covered(n, false);
    std::vector<bool> coverable(n, false);
    for (const auto& c : candidates) {
        for (std::size_t p : c.informs) coverable.at(p) = true;
    }
    std::string orphans;
    for (std::size_t p = 0; p < n; ++p) {
        if (!coverable[p]) orphans += (orphans.empty() ? "" : ", ") + problem.parameter_name(p);
    }
    if (!orphans.empty()) throw unteachable_in_mdp("unteachable in M: no reachable experience informs " + orphans);

    std::vector<TeachingTarget> out;
    std::size_t remaining = n;
    while (remaining > 0) {
        std::size_t best = candidates.size();
        std::size_t best_gain = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            std::size_t gain = 0;
            for (std::size_t p : candidates[i].informs) gain += covered[p] ? 0 : 1;
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        TeachingTarget t{candidates[best].s, candidates[best].a, {}, 1};
        for (std::size_t p : candidates[best].informs) {
            if (covered[p]) continue;
            covered[p] = true;
            t.parameters.push_back(p);
            --remaining;
        }
        out.push_back(std::move(t));
    }
    return out;
}

PathPlan shortest_path_deterministic(const Mdp& m, StateId from, const StatePredicate& goal) {
    if (!m.deterministic()) throw std::invalid_argument("shortest_path_deterministic needs a deterministic MDP");
    constexpr auto kNone = std::numeric_limits<StateId>::max();
    std::vector<StateId> parent(m.num_states(), kNone);
    std::vector<ActionId> via(m.num_states(), 0);
    std::deque<StateId> frontier{from};
    parent[from] = from;
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        if (goal(s)) {
            PathPlan plan;
            plan.goal_state = s;
            for (StateId cur = s; cur != from; cur = parent[cur]) plan.actions.push_back(via[cur]);
            std::reverse(plan.actions.begin(), plan.actions.end());
            plan.expected_length = static_cast<double>(plan.actions.size());
            return plan;
        }
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            const StateId next = m.transitions(s, a).front().next;
            if (parent[next] != kNone) continue;
            parent[next] = s;
            via[next] = a;
            frontier.push_back(next);
        }
    }
    throw unreachable_target("no goal state is reachable from state " + std::to_string(from));
}

StochasticPlan expected_steps_planner(const Mdp& m, const StatePredicate& goal, double tolerance,
                                      std::size_t iteration_cap) {
    const std::size_t S = m.num_states();
    const std::size_t A = m.num_actions();
    StochasticPlan plan;
    plan.goal.resize(S);
    for (StateId s = 0; s < S; ++s) plan.goal[s] = goal(s);

    // States from which some policy hits the goal with probability one: shrink
    // the candidate set until every member can reach the goal using only
    // actions that never leave it.
    std::vector<bool> keep(S, true);
    auto allowed = [&](StateId s, ActionId a) {
        const auto& row = m.transitions(s, a);
        return std::all_of(row.begin(), row.end(), [&](const Transition& t) { return keep[t.next]; });
    };
    while (true) {
        std::vector<bool> hits = plan.goal;
        bool grew = true;
        while (grew) {
            grew = false;
            for (StateId s = 0; s < S; ++s) {
                if (hits[s] || !keep[s]) continue;
                for (ActionId a = 0; a < A && !hits[s]; ++a) {
                    if (!allowed(s, a)) continue;
                    const auto& row = m.transitions(s, a);
                    if (std::any_of(row.begin(), row.end(), [&](const Transition& t) { return hits[t.next]; })) {
                        hits[s] = true;
                        grew = true;
                    }
                }
            }
        }
        if (hits == keep) break;
        keep = std::move(hits);
    }

    plan.expected_steps.assign(S, StochasticPlan::kUnreachable);
    plan.best_action.assign(S, 0);
    for (StateId s = 0; s < S; ++s) {
        if (keep[s]) plan.expected_steps[s] = 0.0;
    }
    std::vector<char> usable(S * A, 0);
    for (StateId s = 0; s < S; ++s) {
        if (!keep[s] || plan.goal[s]) continue;
        for (ActionId a = 0; a < A; ++a) usable[s * A + a] = allowed(s, a) ? 1 : 0;
    }
    auto backup = [&](StateId s, ActionId& arg) {
        double best = StochasticPlan::kUnreachable;
        for (ActionId a = 0; a < A; ++a) {
            if (!usable[s * A + a]) continue;
            double q = 1.0;
            for (const auto& t : m.transitions(s, a)) q += t.prob * plan.expected_steps[t.next];
            if (q < best) {
                best = q;
                arg = a;
            }
        }
        return best;
    };

    // Gauss-Seidel sweeps rising monotonically from zero.
    while (plan.iterations < iteration_cap) {
        ++plan.iterations;
        double change = 0.0;
        for (StateId s = 0; s < S; ++s) {
            if (!keep[s] || plan.goal[s]) continue;
            ActionId arg = 0;
            const double v = backup(s, arg);
            change = std::max(change, std::abs(v - plan.expected_steps[s]));
            plan.expected_steps[s] = v;
        }
        if (change <= tolerance) {
            plan.converged = true;
            break;
        }
    }
    if (!plan.converged) {
        for (StateId s = 0; s < S; ++s) {
            if (!plan.goal[s]) plan.expected_steps[s] = StochasticPlan::kUnreachable;
        }
        return plan;
    }
    for (StateId s = 0; s < S; ++s) {
        if (!keep[s] || plan.goal[s]) continue;
        ActionId arg = 0;
        backup(s, arg);
        plan.best_action[s] = arg;
    }
    return plan;
}

double bellman_residual(const Mdp& m, const StochasticPlan& plan) {
    double worst = 0.0;
    for (StateId s = 0; s < m.num_states(); ++s) {
        const double v = plan.expected_steps[s];
        if (v == StochasticPlan::kUnreachable) continue;
        if (plan.goal[s]) {
            worst = std::max(worst, std::abs(v));
            continue;
        }
        double best = StochasticPlan::kUnreachable;
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            double q = 1.0;
            for (const auto& t : m.transitions(s, a)) q += t.prob * plan.expected_steps[t.next];
            best = std::min(best, q);
        }
        worst = std::max(worst, std::abs(v - best));
    }
    return worst;
}

TeachingSequence teach_in_mdp(TeachingProblem& problem, const Mdp& m, std::span<const TeachingTarget> targets_in,
                              RandomSource& rng, const TourOptions& options) {
    std::vector<TeachingTarget> targets(targets_in.begin(), targets_in.end());
    std::stable_sort(targets.begin(), targets.end(), precedes);
    const bool deterministic = m.deterministic();
    const std::size_t S = m.num_states();
    const std::size_t P = problem.parameter_count();

    TeachingSequence seq;
    StateId current = m.start();
    auto execute = [&](ActionId a) {
        if (seq.steps.size() >= options.max_steps) {
            throw std::runtime_error("teaching tour exceeded " + std::to_string(options.max_steps) + " steps");
        }
        const StepResult r = step(m, current, a, rng);
        seq.steps.push_back({current, a, r.reward});
        problem.observe(current, a, r.next);
        current = r.next;
    };

    // Goal regions depend on which parameters are open, so they are cached
    // against the current done-vector and dropped whenever it changes.
    std::vector<bool> done(P);
    auto refresh_done = [&] {
        bool changed = false;
        for (std::size_t p = 0; p < P; ++p) {
            const bool d = problem.parameter_done(p);
            changed = changed || d != done[p];
            done[p] = d;
        }
        return changed;
    };
    refresh_done();

    auto open_parameters = [&](const TeachingTarget& t) {
        std::vector<std::size_t> open;
        for (std::size_t p : t.parameters) {
            if (!done[p]) open.push_back(p);
        }
        return open;
    };
    std::map<std::size_t, std::vector<bool>> region_cache;
    auto goal_region = [&](std::size_t ti) -> const std::vector<bool>& {
        auto it = region_cache.find(ti);
        if (it != region_cache.end()) return it->second;
        const auto open = open_parameters(targets[ti]);
        std::vector<bool> region(S);
        for (StateId s = 0; s < S; ++s) {
            const auto inf = problem.informs(s, targets[ti].action);
            region[s] = std::includes(inf.begin(), inf.end(), open.begin(), open.end());
        }
        return region_cache.emplace(ti, std::move(region)).first->second;
    };
    std::map<std::vector<bool>, StochasticPlan> plan_cache;
    auto stochastic_plan = [&](const std::vector<bool>& region) -> const StochasticPlan& {
        auto it = plan_cache.find(region);
        if (it != plan_cache.end()) return it->second;
        auto plan = expected_steps_planner(m, [&](StateId s) { return static_cast<bool>(region[s]); });
        return plan_cache.emplace(region, std::move(plan)).first->second;
    };

    while (!problem.taught()) {
        double best_cost = std::numeric_limits<double>::infinity();
        std::size_t chosen = targets.size();
        bool any_open = false;
        std::vector<std::uint64_t> dist;
        if (deterministic) dist = bfs_distances(m, current);
        for (std::size_t ti = 0; ti < targets.size(); ++ti) {
            if (open_parameters(targets[ti]).empty()) continue;
            any_open = true;
            const auto& region = goal_region(ti);
            double cost = std::numeric_limits<double>::infinity();
            if (deterministic) {
                for (StateId s = 0; s < S; ++s) {
                    if (region[s] && dist[s] != std::numeric_limits<std::uint64_t>::max()) {
                        cost = std::min(cost, static_cast<double>(dist[s]));
                    }
                }
            } else {
                cost = stochastic_plan(region).expected_steps[current];
            }
            if (cost < best_cost) {
                best_cost = cost;
                chosen = ti;
            }
        }
        if (!any_open) throw std::logic_error("every target is closed but the concept is not taught");
        if (chosen == targets.size()) throw unreachable_target("no open teaching target is reachable");

        // Walk to the chosen target and demonstrate it once, unless it closes
        // on the way. Plans are refreshed only when some parameter changes
        // status.
        const std::vector<bool>* region = &goal_region(chosen);
        const StochasticPlan* plan = deterministic ? nullptr : &stochastic_plan(*region);
        std::vector<ActionId> path;
        std::size_t along = 0;
        while (true) {
            if ((*region)[current]) {
                execute(targets[chosen].action);
                if (refresh_done()) region_cache.clear();
                break;
            }
            ActionId a = 0;
            if (deterministic) {
                if (along == path.size()) {
                    path = shortest_path_deterministic(m, current, [&](StateId s) { return static_cast<bool>((*region)[s]); })
                               .actions;
                    along = 0;
                }
                a = path[along++];
            } else {
                if (!plan->reachable(current)) throw unreachable_target("teaching target became unreachable");
                a = plan->best_action[current];
            }
            execute(a);
            if (refresh_done()) {
                region_cache.clear();
                if (open_parameters(targets[chosen]).empty()) break;
                region = &goal_region(chosen);
                if (!deterministic) plan = &stochastic_plan(*region);
                path.clear();
                along = 0;
            }
        }
    }
    seq.final_state = current;
    return seq;
}

TeachingSequence teach_in_mdp(TeachingProblem& problem, const Mdp& m, RandomSource& rng, const TourOptions& options) {
    const ReachableSet reachable = enumerate_reachable(m, options.horizon, options.state_cap);
    const auto targets = build_teaching_set_greedy(problem, reachable);
    return teach_in_mdp(problem, m, targets, rng, options);
}

TourPlan greedy_tour(const Mdp& m, StateId start, std::span<const TeachingTarget> targets) {
    if (!m.deterministic()) throw std::invalid_argument("greedy_tour needs a deterministic MDP");
    TourPlan plan;
    std::vector<bool> visited(targets.size(), false);
    StateId current = start;
    for (std::size_t round = 0; round < targets.size(); ++round) {
        const auto dist = bfs_distances(m, current);
        std::size_t best = targets.size();
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (visited[i] || dist[targets[i].state] == std::numeric_limits<std::uint64_t>::max()) continue;
            if (best == targets.size() || dist[targets[i].state] < dist[targets[best].state]) best = i;
        }
        if (best == targets.size()) throw unreachable_target("tour target unreachable");
        visited[best] = true;
        plan.order.push_back(best);
        plan.length += dist[targets[best].state] + 1;
        current = m.transitions(targets[best].state, targets[best].action).front().next;
    }
    return plan;
}

// Generic demonstration problem --------------------------------------------------

DemonstrationProblem::DemonstrationProblem(std::vector<std::pair<StateId, ActionId>> required)
    : required_(std::move(required)), seen_(required_.size(), false) {}

std::string DemonstrationProblem::parameter_name(std::size_t p) const {
    const auto& [s, a] = required_.at(p);
    return "(" + std::to_string(s) + ", " + std::to_string(a) + ")";
}

std::vector<std::size_t> DemonstrationProblem::informs(StateId s, ActionId a) const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < required_.size(); ++p) {
        if (required_[p].first == s && required_[p].second == a) out.push_back(p);
    }
    return out;
}

void DemonstrationProblem::observe(StateId s, ActionId a, StateId) {
    for (std::size_t p : informs(s, a)) seen_[p] = true;
}

bool DemonstrationProblem::taught() const { return std::all_of(seen_.begin(), seen_.end(), [](bool b) { return b; }); }

// Taxi ---------------------------------------------------------------------------

std::vector<TaxiSchema> taxi_action_set(std::string_view name) {
    if (name == "pickup") return {TaxiSchema::Pickup};
    if (name == "pickup-dropoff" || name == "pickup-putdown") return {TaxiSchema::Pickup, TaxiSchema::Dropoff};
    if (name == "movement") return {TaxiSchema::Up, TaxiSchema::Down, TaxiSchema::Left, TaxiSchema::Right};
    if (name == "all") return {kTaxiSchemas.begin(), kTaxiSchemas.end()};
    throw std::invalid_argument("unknown taxi action set '" + std::string(name) + "'");
}

TaxiPreconditionProblem::TaxiPreconditionProblem(const TaxiEnv& env, std::vector<TaxiSchema> schemas,
                                                 TaxiProtocol protocol)
    : env_(&env), protocol_(protocol) {
    for (auto s : schemas) {
        if (std::find(schemas_.begin(), schemas_.end(), s) == schemas_.end()) schemas_.push_back(s);
    }
    if (schemas_.empty()) throw std::invalid_argument("no taxi actions to teach");
    for (auto s : schemas_) {
        const auto& truth = env.precondition(s);
        for (std::size_t v = 0; v < truth.size(); ++v) {
            if (!truth.is_relevant(v)) {
                params_.push_back({s, v, true});
            } else if (protocol_ == TaxiProtocol::Td) {
                params_.push_back({s, v, false});
            }
        }
        spaces_.emplace_back(truth.size());
        isolated_.push_back(0);
    }
}

std::size_t TaxiPreconditionProblem::slot(TaxiSchema s) const {
    auto it = std::find(schemas_.begin(), schemas_.end(), s);
    return it == schemas_.end() ? schemas_.size() : static_cast<std::size_t>(it - schemas_.begin());
}

std::string TaxiPreconditionProblem::parameter_name(std::size_t p) const {
    const auto& param = params_.at(p);
    return std::string(to_string(param.schema)) + (param.dispel ? ": dispel " : ": isolate ") +
           env_->vocabulary(param.schema)[param.predicate];
}

std::vector<std::size_t> TaxiPreconditionProblem::informs(StateId s, ActionId a) const {
    const TaxiSchema schema = env_->actions().at(a).schema;
    if (slot(schema) == schemas_.size()) return {};
    const TaxiState state = env_->decode(s);
    const BitString x = env_->ground_predicates(state, a).predicates;
    const auto& truth = env_->precondition(schema);
    const Label label = conjunction_label(truth, x);
    const std::uint64_t zeros = ~x.mask() & low_bits(x.size());
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < params_.size(); ++p) {
        const auto& param = params_[p];
        if (param.schema != schema) continue;
        const std::uint64_t bit = 1ULL << param.predicate;
        if (param.dispel ? (label == 1 && (zeros & bit)) : (label == 0 && (zeros & truth.relevant()) == bit)) {
            out.push_back(p);
        }
    }
    return out;
}

void TaxiPreconditionProblem::observe(StateId s, ActionId a, StateId next) {
    const TaxiSchema schema = env_->actions().at(a).schema;
    const std::size_t k = slot(schema);
    if (k == schemas_.size()) return;
    const TaxiState state = env_->decode(s);
    const TaxiStep outcome = env_->step(state, a);
    if (env_->encode(outcome.next) != next) throw std::logic_error("observed transition disagrees with the taxi model");
    const BitString x = env_->ground_predicates(state, a).predicates;
    spaces_[k].apply({x, outcome.label});
    if (outcome.label == 0) {
        const std::uint64_t hit = ~x.mask() & low_bits(x.size()) & env_->precondition(schema).relevant();
        if (std::popcount(hit) == 1) isolated_[k] |= hit;
    }
}

bool TaxiPreconditionProblem::parameter_done(std::size_t p) const {
    const auto& param = params_.at(p);
    const std::size_t k = slot(param.schema);
    const std::uint64_t bit = 1ULL << param.predicate;
    return param.dispel ? (spaces_[k].upper_bound() & bit) == 0 : (isolated_[k] & bit) != 0;
}

std::optional<MonotoneConjunction> TaxiPreconditionProblem::learned(TaxiSchema s) const {
    const std::size_t k = slot(s);
    if (k == schemas_.size()) throw std::invalid_argument("taxi action is not being taught");
    if (protocol_ == TaxiProtocol::Td) return spaces_[k].unique();
    return MonotoneConjunction(spaces_[k].size(), spaces_[k].upper_bound());
}

const VersionSpace& TaxiPreconditionProblem::version_space(TaxiSchema s) const {
    const std::size_t k = slot(s);
    if (k == schemas_.size()) throw std::invalid_argument("taxi action is not being taught");
    return spaces_[k];
}

bool TaxiPreconditionProblem::taught() const {
    return std::all_of(schemas_.begin(), schemas_.end(), [&](TaxiSchema s) {
        const auto l = learned(s);
        return l && *l == env_->precondition(s);
    });
}

namespace {

TaxiTeachingResult run_taxi_teacher(const TaxiEnv& env, std::span<const TaxiSchema> schemas, TaxiProtocol protocol) {
    TaxiPreconditionProblem problem(env, {schemas.begin(), schemas.end()}, protocol);
    const Mdp m = env.to_mdp();
    RandomSource unused(0, 0);
    TaxiTeachingResult out;
    out.sequence = teach_in_mdp(problem, m, unused);
    out.exact = true;
    for (auto s : problem.schemas()) {
        auto l = problem.learned(s);
        out.exact = out.exact && l && *l == env.precondition(s);
        out.learned.emplace_back(s, std::move(l));
    }
    return out;
}

}  // namespace

TaxiTeachingResult taxi_td_teacher(const TaxiEnv& env, std::span<const TaxiSchema> schemas) {
    return run_taxi_teacher(env, schemas, TaxiProtocol::Td);
}

TaxiTeachingResult taxi_std_approx_teacher(const TaxiEnv& env, std::span<const TaxiSchema> schemas) {
    return run_taxi_teacher(env, schemas, TaxiProtocol::StdApprox);
}

// Sequential Bitflip --------------------------------------------------------------

std::string_view to_string(SequentialStrategy s) {
    switch (s) {
        case SequentialStrategy::NtdPar: return "NTD-PAR";
        case SequentialStrategy::NstdPar: return "NSTD-PAR";
        case SequentialStrategy::NstdInd: return "NSTD-IND";
    }
    return "?";
}

SequentialStrategy parse_sequential_strategy(std::string_view name) {
    for (auto s : {SequentialStrategy::NtdPar, SequentialStrategy::NstdPar, SequentialStrategy::NstdInd}) {
        if (to_string(s) == name) return s;
    }
    throw std::invalid_argument("unknown sequential strategy '" + std::string(name) + "'");
}

BitflipSequentialProblem::BitflipSequentialProblem(const BitflipEnv& env, SequentialStrategy strategy,
                                                   const AccuracyParams& params)
    : env_(&env), strategy_(strategy), tallies_(env.bits()) {
    const std::size_t n = env.bits();
    const std::size_t k = make_bitflip_dbn(env.p()).k_par();
    cap_ = hoeffding_samples(dbn_condition_params(params, n, k));
    half_width_ = params.epsilon() / (2.0 * static_cast<double>(n));
}

std::string BitflipSequentialProblem::parameter_name(std::size_t p) const { return "shift success of bit " + std::to_string(p); }

std::vector<std::size_t> BitflipSequentialProblem::informs(StateId s, ActionId a) const {
    if (a != BitflipEnv::kShift) return {};
    std::uint64_t e = env_->exposed(s);
    if (strategy_ == SequentialStrategy::NstdInd) {
        // Every other bit must keep its value whatever its shift probability.
        if (std::popcount(e) != 1 || parameter_done(static_cast<std::size_t>(std::countr_zero(e)))) return {};
    }
    std::vector<std::size_t> out;
    for (; e != 0; e &= e - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(e)));
    return out;
}

void BitflipSequentialProblem::observe(StateId s, ActionId a, StateId next) {
    if (a != BitflipEnv::kShift) return;
    const std::uint64_t incoming = (static_cast<std::uint64_t>(s) << 1) & low_bits(env_->bits());
    for (std::uint64_t e = env_->exposed(s); e != 0; e &= e - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(e));
        tallies_[i].record(((next >> i) & 1U) == ((incoming >> i) & 1U));
    }
}

bool BitflipSequentialProblem::parameter_done(std::size_t p) const {
    const Tally& t = tallies_.at(p);
    if (strategy_ == SequentialStrategy::NtdPar) return t.count >= cap_;
    return StopRule(half_width_, cap_).satisfied(t, env_->p()[p]);
}

bool BitflipSequentialProblem::taught() const {
    for (std::size_t i = 0; i < env_->bits(); ++i) {
        if (!parameter_done(i)) return false;
    }
    return true;
}

double BitflipSequentialProblem::max_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < tallies_.size(); ++i) {
        if (tallies_[i].count == 0) return std::numeric_limits<double>::quiet_NaN();
        worst = std::max(worst, std::abs(tallies_[i].mean() - env_->p()[i]));
    }
    return worst;
}

SequentialRun teach_bitflip_sequential(const BitflipEnv& env, SequentialStrategy strategy,
                                       const AccuracyParams& params, RandomSource& rng, const TourOptions& options) {
    BitflipSequentialProblem problem(env, strategy, params);
    const Mdp m = env.to_mdp();
    SequentialRun out;
    out.sequence = teach_in_mdp(problem, m, rng, options);
    out.tallies = problem.tallies();
    out.max_error = problem.max_error();
    return out;
}

// Sequential coin direction --------------------------------------------------------

CoinDirectionDemo nsstd_coin_direction(const BernoulliConcept& c, const std::function<int()>& flip) {
    if (c.p_star == 0.5) throw std::invalid_argument("a fair coin has no direction to teach");
    const int bias = c.p_star > 0.5 ? 1 : 0;
    CoinDirectionDemo demo;
    demo.flips.push_back(flip());
    if (demo.flips.front() != bias) demo.flips.push_back(flip());
    demo.inferred = infer_coin_direction(demo.flips);
    return demo;
}

CoinDirectionDemo nsstd_coin_direction(const BernoulliConcept& c, RandomSource& rng) {
    return nsstd_coin_direction(c, [&] { return bernoulli_sample(c.p_star, rng); });
}

int infer_coin_direction(std::span<const int> flips) {
    for (int f : flips) {
        if (f != 0 && f != 1) throw std::invalid_argument("coin flips must be 0 or 1");
    }
    if (flips.size() == 1) return flips[0];
    if (flips.size() == 2) return 1 - flips[0];
    throw std::invalid_argument("a direction demonstration has one or two flips");
}

}  // namespace mteach
