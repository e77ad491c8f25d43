#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mteach/concepts.hpp"
#include "mteach/random.hpp"

namespace mteach {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

struct Transition {
    StateId next;
    double prob;
};

/// Finite tabular MDP. States and actions are dense indices.
class Mdp {
public:
    Mdp(std::size_t num_states, std::size_t num_actions, StateId start, double gamma = 0.95);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    StateId start() const { return start_; }
    double gamma() const { return gamma_; }

    /// Row must be a distribution over valid states.
    void set_transitions(StateId s, ActionId a, std::vector<Transition> row);
    void set_reward(StateId s, ActionId a, double r);

    const std::vector<Transition>& transitions(StateId s, ActionId a) const;
    double reward(StateId s, ActionId a) const { return reward_.at(index(s, a)); }
    double probability(StateId s, ActionId a, StateId next) const;

    /// Every row is a point mass.
    bool deterministic() const;

    void set_action_name(ActionId a, std::string name);
    const std::string& action_name(ActionId a) const { return action_names_.at(a); }

private:
    std::size_t index(StateId s, ActionId a) const;

    std::size_t num_states_;
    std::size_t num_actions_;
    StateId start_;
    double gamma_;
    std::vector<std::vector<Transition>> rows_;
    std::vector<double> reward_;
    std::vector<std::string> action_names_;
};

struct StepResult {
    StateId next;
    double reward;
};

StepResult step(const Mdp& m, StateId s, ActionId a, RandomSource& rng);

struct TransitionExperience {
    StateId s;
    ActionId a;
    double r;
    StateId next;

    auto operator<=>(const TransitionExperience&) const = default;
};

struct ReachableSet {
    /// Sorted by (s, a, next).
    std::vector<TransitionExperience> transitions;
    /// Sorted state ids.
    std::vector<StateId> states;
    bool truncated = false;
};

/// Breadth-first closure from the start state. `horizon` bounds the number of
/// actions taken from s0 (0 = transitions out of s0 only); `state_cap` stops
/// expansion and marks the result truncated.
ReachableSet enumerate_reachable(const Mdp& m, std::optional<std::size_t> horizon = std::nullopt,
                                 std::size_t state_cap = 1'000'000);

struct SequenceStep {
    StateId state;
    ActionId action;
    double reward;
};

/// Ordered trajectory from s0. Unlike a TeachingCollection, the learner sees
/// the order.
struct TeachingSequence {
    std::vector<SequenceStep> steps;
    StateId final_state = 0;

    std::size_t length() const { return steps.size(); }
};

/// Every consecutive (x_t, a_t, x_{t+1}) has positive probability under m.
bool is_legal_sequence(const Mdp& m, const TeachingSequence& seq);

// Bitflip ----------------------------------------------------------------------

/// n-bit Bitflip. flip0 toggles bit 0; shift moves every bit up one position,
/// with a constant 0 entering bit 0, and each bit's move succeeds with
/// probability p[i] (on failure the bit keeps its value).
class BitflipEnv {
public:
    static constexpr ActionId kFlip0 = 0;
    static constexpr ActionId kShift = 1;

    explicit BitflipEnv(std::vector<double> p, std::uint64_t start = 0);

    std::size_t bits() const { return p_.size(); }
    const std::vector<double>& p() const { return p_; }
    std::uint64_t start() const { return start_; }

    /// Bit i is exposed by a shift from `state` iff its incoming value differs
    /// from its current value, i.e. the outcome depends on p[i].
    std::uint64_t exposed(std::uint64_t state) const;

    std::uint64_t step(std::uint64_t state, ActionId a, RandomSource& rng) const;
    std::vector<std::pair<std::uint64_t, double>> successors(std::uint64_t state, ActionId a) const;

    /// Tabular model over all 2^n states, state id = bit mask. n <= 20.
    Mdp to_mdp() const;

private:
    std::vector<double> p_;
    std::uint64_t start_;
};

/// Bitflip with shift probabilities 1 except at the listed stochastic bits.
BitflipEnv make_sequential_bitflip(std::size_t n, std::span<const std::size_t> stochastic_bits, double p_stochastic);

// Taxi -------------------------------------------------------------------------

struct Cell {
    int x = 0;
    int y = 0;

    auto operator<=>(const Cell&) const = default;
};

enum class TaxiSchema { Up, Down, Left, Right, Pickup, Dropoff };

inline constexpr std::array<TaxiSchema, 6> kTaxiSchemas = {TaxiSchema::Up,   TaxiSchema::Down,   TaxiSchema::Left,
                                                           TaxiSchema::Right, TaxiSchema::Pickup, TaxiSchema::Dropoff};

std::string_view to_string(TaxiSchema s);
TaxiSchema parse_taxi_schema(std::string_view name);
std::size_t schema_arity(TaxiSchema s);

struct TaxiConfig {
    int width = 5;
    int height = 5;
    /// Bottom-left and top-right corners.
    std::vector<Cell> landmarks = {{0, 0}, {4, 4}};
    Cell taxi_start = {2, 2};
    std::size_t passenger_start = 0;
    std::size_t destination = 1;
    /// Optional overrides of the true preconditions, as predicate names from
    /// the schema vocabulary (e.g. "ClearN(a0)").
    std::vector<std::pair<TaxiSchema, std::vector<std::string>>> preconditions;
};

/// Object ids: 0 = taxi, 1 = passenger, 2 + j = landmark j.
using ObjectId = std::size_t;

struct TaxiState {
    Cell taxi;
    /// Landmark index where the passenger waits, or landmarks.size() when the
    /// passenger rides in the taxi.
    std::size_t passenger;

    auto operator<=>(const TaxiState&) const = default;
};

struct GroundedAction {
    TaxiSchema schema;
    std::vector<ObjectId> args;
};

struct GroundedInstance {
    GroundedAction action;
    BitString predicates;
};

struct TaxiStep {
    TaxiState next;
    double reward;
    /// 1 when the precondition held and the action took effect, else 0.
    Label label;
};

/// Deterministic 5x5 OOMDP Taxi with variablized action preconditions.
///
/// Each schema has a predicate vocabulary over its argument slots a0..a_{m-1}:
/// WallN/S/E/W(a0) and ClearN/S/E/W(a0), then for every slot j >= 1
/// On(a0,aj), InTaxi(aj) and OutOfTaxi(aj). On means both objects stand on
/// the same grid cell; a riding passenger is not on the grid.
class TaxiEnv {
public:
    explicit TaxiEnv(TaxiConfig config = {});

    const TaxiConfig& config() const { return config_; }
    std::size_t num_objects() const { return 2 + config_.landmarks.size(); }
    std::string object_name(ObjectId o) const;

    std::size_t num_states() const;
    StateId encode(const TaxiState& s) const;
    TaxiState decode(StateId id) const;
    TaxiState start_state() const;

    /// The MDP action table: four moves, then pickup/dropoff with a0 = taxi and
    /// every ordered pair of distinct non-taxi objects in slots a1, a2.
    const std::vector<GroundedAction>& actions() const { return actions_; }
    std::string action_name(ActionId a) const;

    const std::vector<std::string>& vocabulary(TaxiSchema s) const;
    std::size_t predicate_index(TaxiSchema s, std::string_view name) const;

    /// Evaluates the schema vocabulary under `binding`. Throws on arity mismatch.
    GroundedInstance ground_predicates(const TaxiState& s, TaxiSchema schema, std::span<const ObjectId> binding) const;
    GroundedInstance ground_predicates(const TaxiState& s, ActionId a) const;

    const MonotoneConjunction& precondition(TaxiSchema s) const;

    TaxiStep step(const TaxiState& s, ActionId a) const;

    Mdp to_mdp() const;

private:
    Cell position(const TaxiState& s, ObjectId o) const;
    bool on_grid(const TaxiState& s, ObjectId o) const;

    TaxiConfig config_;
    std::vector<GroundedAction> actions_;
    std::array<std::vector<std::string>, 6> vocab_;
    std::vector<MonotoneConjunction> preconditions_;
};

}  // namespace mteach
