#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mteach/concepts.hpp"
#include "mteach/core.hpp"
#include "mteach/environments.hpp"

namespace mteach {

/// Raised when some parameter of the concept is informed by no reachable
/// experience. The message lists the orphan parameters.
class unteachable_in_mdp : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when no open target can be reached from the current state.
class unreachable_target : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A concept taught inside an MDP, seen through its parameters.
///
/// The teacher side (`informs`, `parameter_done`) may consult the true
/// concept; the learner side is whatever `observe` accumulates. Every executed
/// transition is observed, navigation included.
class TeachingProblem {
public:
    virtual ~TeachingProblem() = default;

    virtual std::size_t parameter_count() const = 0;
    virtual std::string parameter_name(std::size_t p) const = 0;

    /// Parameters on which demonstrating `a` in `s` makes progress, given the
    /// learner's current state. Sorted ascending.
    virtual std::vector<std::size_t> informs(StateId s, ActionId a) const = 0;

    virtual void observe(StateId s, ActionId a, StateId next) = 0;

    /// Current status; noisy parameters may fall back to open after further
    /// samples disturb them.
    virtual bool parameter_done(std::size_t p) const = 0;

    /// The learner holds the concept (singleton version space, or every
    /// condition within tolerance).
    virtual bool taught() const = 0;
};

struct TeachingTarget {
    StateId state;
    ActionId action;
    /// Parameters this experience was chosen to cover.
    std::vector<std::size_t> parameters;
    /// Minimum demonstrations; noisy targets repeat until their stop rule fires.
    std::uint64_t required_visits = 1;
};

/// Greedy set cover over the distinct (s, a) pairs of `reachable`. Each round
/// adds the pair informing the most uncovered parameters; ties go to the
/// smallest (state, action). Throws unteachable_in_mdp on orphans.
std::vector<TeachingTarget> build_teaching_set_greedy(const TeachingProblem& problem, const ReachableSet& reachable);

using StatePredicate = std::function<bool(StateId)>;

struct PathPlan {
    std::vector<ActionId> actions;
    StateId goal_state = 0;
    double expected_length = 0.0;
};

/// Breadth-first shortest action sequence from `from` to any goal state.
/// Actions are tried in index order. Requires a deterministic MDP.
PathPlan shortest_path_deterministic(const Mdp& m, StateId from, const StatePredicate& goal);

struct StochasticPlan {
    static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

    /// Expected steps to hit the goal set; kUnreachable where the goal is not
    /// reached with probability one under any policy.
    std::vector<double> expected_steps;
    /// Greedy action per state (0 on goal and unreachable states).
    std::vector<ActionId> best_action;
    std::vector<bool> goal;
    std::size_t iterations = 0;
    bool converged = false;

    bool reachable(StateId s) const { return expected_steps[s] != kUnreachable; }
};

/// Value iteration on expected steps-to-goal:
/// V(s) = 0 on goal states, else min_a 1 + sum_s' T(s'|s,a) V(s').
StochasticPlan expected_steps_planner(const Mdp& m, const StatePredicate& goal, double tolerance = 1e-9,
                                      std::size_t iteration_cap = 1'000'000);

/// Largest |V(s) - (Bellman backup of V)(s)| over finite states.
double bellman_residual(const Mdp& m, const StochasticPlan& plan);

struct TourOptions {
    std::uint64_t max_steps = 5'000'000;
    std::optional<std::size_t> horizon;
    std::size_t state_cap = 1'000'000;
};

/// Algorithm 1's touring loop. Repeatedly picks the open target closest to
/// the current state (BFS length, or expected steps when M is stochastic),
/// walks there and demonstrates its action, until the problem is taught.
///
/// A target's goal region is every state where its action informs all of the
/// target's still-open parameters, so a target may be served from a state
/// other than the one the cover chose. Targets whose parameters are closed
/// incidentally are dropped without a visit.
TeachingSequence teach_in_mdp(TeachingProblem& problem, const Mdp& m, std::span<const TeachingTarget> targets,
                              RandomSource& rng, const TourOptions& options = {});

/// Builds the greedy teaching set over the reachable closure, then tours it.
TeachingSequence teach_in_mdp(TeachingProblem& problem, const Mdp& m, RandomSource& rng,
                              const TourOptions& options = {});

/// Nearest-neighbour tour over fixed (state, action) demonstrations in a
/// deterministic MDP. Length counts navigation steps plus one per
/// demonstration.
struct TourPlan {
    std::vector<std::size_t> order;
    std::uint64_t length = 0;
};

TourPlan greedy_tour(const Mdp& m, StateId start, std::span<const TeachingTarget> targets);

// Generic demonstration problem --------------------------------------------------

/// Each parameter is one required (state, action) experience; it is done once
/// the learner has seen it.
class DemonstrationProblem : public TeachingProblem {
public:
    explicit DemonstrationProblem(std::vector<std::pair<StateId, ActionId>> required);

    std::size_t parameter_count() const override { return required_.size(); }
    std::string parameter_name(std::size_t p) const override;
    std::vector<std::size_t> informs(StateId s, ActionId a) const override;
    void observe(StateId s, ActionId a, StateId next) override;
    bool parameter_done(std::size_t p) const override { return seen_.at(p); }
    bool taught() const override;

private:
    std::vector<std::pair<StateId, ActionId>> required_;
    std::vector<bool> seen_;
};

// Taxi ---------------------------------------------------------------------------

enum class TaxiProtocol { Td, StdApprox };

/// Named Taxi action sets: "pickup", "pickup-dropoff" (alias
/// "pickup-putdown"), "movement", "all".
std::vector<TaxiSchema> taxi_action_set(std::string_view name);

/// Precondition teaching over a set of Taxi schemas.
///
/// TD parameters: for each irrelevant predicate, a positive example where it
/// is 0 ("dispel"); for each relevant predicate, a negative where it is the
/// only relevant predicate at 0 ("isolate"). STD-approx keeps the dispel
/// parameters only and its learner reads the relevant set off the positives.
class TaxiPreconditionProblem : public TeachingProblem {
public:
    TaxiPreconditionProblem(const TaxiEnv& env, std::vector<TaxiSchema> schemas, TaxiProtocol protocol);

    std::size_t parameter_count() const override { return params_.size(); }
    std::string parameter_name(std::size_t p) const override;
    std::vector<std::size_t> informs(StateId s, ActionId a) const override;
    void observe(StateId s, ActionId a, StateId next) override;
    bool parameter_done(std::size_t p) const override;
    bool taught() const override;

    const std::vector<TaxiSchema>& schemas() const { return schemas_; }
    /// The learner's hypothesis, if it has committed to one.
    std::optional<MonotoneConjunction> learned(TaxiSchema s) const;
    const VersionSpace& version_space(TaxiSchema s) const;

private:
    struct Param {
        TaxiSchema schema;
        std::size_t predicate;
        bool dispel;
    };
    std::size_t slot(TaxiSchema s) const;

    const TaxiEnv* env_;
    std::vector<TaxiSchema> schemas_;
    TaxiProtocol protocol_;
    std::vector<Param> params_;
    std::vector<VersionSpace> spaces_;
    /// Relevant predicates already isolated by some observed negative.
    std::vector<std::uint64_t> isolated_;
};

struct TaxiTeachingResult {
    TeachingSequence sequence;
    std::vector<std::pair<TaxiSchema, std::optional<MonotoneConjunction>>> learned;
    /// Every learned precondition equals the true one.
    bool exact = false;
};

TaxiTeachingResult taxi_td_teacher(const TaxiEnv& env, std::span<const TaxiSchema> schemas);

/// Shows the most specific reachable positives until every irrelevant
/// predicate has been zeroed once, then stops; negatives are never needed.
TaxiTeachingResult taxi_std_approx_teacher(const TaxiEnv& env, std::span<const TaxiSchema> schemas);

// Sequential Bitflip --------------------------------------------------------------

enum class SequentialStrategy { NtdPar, NstdPar, NstdInd };

std::string_view to_string(SequentialStrategy s);
SequentialStrategy parse_sequential_strategy(std::string_view name);

/// Teaching the shift probabilities of a Bitflip MDP from a single trajectory.
/// One parameter per bit; every shift that exposes bit i is a sample of p_i.
/// Budgets are per bit: accuracy eps/n and confidence delta/n.
class BitflipSequentialProblem : public TeachingProblem {
public:
    BitflipSequentialProblem(const BitflipEnv& env, SequentialStrategy strategy, const AccuracyParams& params);

    std::size_t parameter_count() const override { return env_->bits(); }
    std::string parameter_name(std::size_t p) const override;
    std::vector<std::size_t> informs(StateId s, ActionId a) const override;
    void observe(StateId s, ActionId a, StateId next) override;
    bool parameter_done(std::size_t p) const override;
    bool taught() const override;

    const std::vector<Tally>& tallies() const { return tallies_; }
    std::uint64_t sample_cap() const { return cap_; }
    /// Max over bits of |p_hat - p|; NaN if some bit was never exposed.
    double max_error() const;

private:
    const BitflipEnv* env_;
    SequentialStrategy strategy_;
    std::uint64_t cap_;
    double half_width_;
    std::vector<Tally> tallies_;
};

struct SequentialRun {
    TeachingSequence sequence;
    std::vector<Tally> tallies;
    double max_error = 0.0;
};

SequentialRun teach_bitflip_sequential(const BitflipEnv& env, SequentialStrategy strategy,
                                       const AccuracyParams& params, RandomSource& rng,
                                       const TourOptions& options = {});

// Sequential coin direction --------------------------------------------------------

/// Heads is 1, tails is 0.
struct CoinDirectionDemo {
    std::vector<int> flips;
    int inferred;
};

/// Direction of a biased coin shown by order alone: stop after the first flip
/// if it lands on the biased side, otherwise flip exactly once more.
CoinDirectionDemo nsstd_coin_direction(const BernoulliConcept& c, RandomSource& rng);
CoinDirectionDemo nsstd_coin_direction(const BernoulliConcept& c, const std::function<int()>& flip);

/// One flip: its side. Two flips: the side opposite the first.
int infer_coin_direction(std::span<const int> flips);

}  // namespace mteach
