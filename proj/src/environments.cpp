#include "mteach/environments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace mteach {

// Mdp --------------------------------------------------------------------------

Mdp::Mdp(std::size_t num_states, std::size_t num_actions, StateId start, double gamma)
    : num_states_(num_states), num_actions_(num_actions), start_(start), gamma_(gamma) {
    if (num_states == 0 || num_actions == 0) throw std::invalid_argument("MDP needs states and actions");
    if (start >= num_states) throw std::invalid_argument("start state out of range");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
    rows_.resize(num_states * num_actions);
    reward_.assign(num_states * num_actions, 0.0);
    for (std::size_t s = 0; s < num_states; ++s) {
        for (std::size_t a = 0; a < num_actions; ++a) {
            rows_[s * num_actions + a] = {Transition{static_cast<StateId>(s), 1.0}};
        }
    }
    for (std::size_t a = 0; a < num_actions; ++a) action_names_.push_back("a" + std::to_string(a));
}

std::size_t Mdp::index(StateId s, ActionId a) const {
    if (s >= num_states_ || a >= num_actions_) throw std::out_of_range("state or action out of range");
    return static_cast<std::size_t>(s) * num_actions_ + a;
}

void Mdp::set_transitions(StateId s, ActionId a, std::vector<Transition> row) {
    if (row.empty()) throw std::invalid_argument("transition row is empty");
    double total = 0.0;
    for (const auto& t : row) {
        if (t.next >= num_states_) throw std::invalid_argument("transition to unknown state");
        if (!(t.prob > 0.0)) throw std::invalid_argument("transition probabilities must be positive");
        total += t.prob;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("transition row does not sum to one");
    rows_[index(s, a)] = std::move(row);
}

void Mdp::set_reward(StateId s, ActionId a, double r) { reward_[index(s, a)] = r; }

const std::vector<Transition>& Mdp::transitions(StateId s, ActionId a) const { return rows_[index(s, a)]; }

double Mdp::probability(StateId s, ActionId a, StateId next) const {
    double p = 0.0;
    for (const auto& t : transitions(s, a)) {
        if (t.next == next) p += t.prob;
    }
    return p;
}

bool Mdp::deterministic() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const auto& row) { return row.size() == 1; });
}

void Mdp::set_action_name(ActionId a, std::string name) { action_names_.at(a) = std::move(name); }

StepResult step(const Mdp& m, StateId s, ActionId a, RandomSource& rng) {
    const auto& row = m.transitions(s, a);
    if (row.size() == 1) return {row.front().next, m.reward(s, a)};
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& t : row) {
        acc += t.prob;
        if (u < acc) return {t.next, m.reward(s, a)};
    }
    return {row.back().next, m.reward(s, a)};
}

ReachableSet enumerate_reachable(const Mdp& m, std::optional<std::size_t> horizon, std::size_t state_cap) {
    ReachableSet out;
    std::vector<std::int64_t> depth(m.num_states(), -1);
    std::deque<StateId> frontier{m.start()};
    depth[m.start()] = 0;
    std::size_t discovered = 1;
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        if (horizon && static_cast<std::size_t>(depth[s]) > *horizon) continue;
        for (ActionId a = 0; a < m.num_actions(); ++a) {
            for (const auto& t : m.transitions(s, a)) {
                out.transitions.push_back({s, a, m.reward(s, a), t.next});
                if (depth[t.next] >= 0) continue;
                if (discovered >= state_cap) {
                    out.truncated = true;
                    continue;
                }
                depth[t.next] = depth[s] + 1;
                ++discovered;
                frontier.push_back(t.next);
            }
        }
    }
    for (StateId s = 0; s < m.num_states(); ++s) {
        if (depth[s] >= 0) out.states.push_back(s);
    }
    std::sort(out.transitions.begin(), out.transitions.end());
    return out;
}

bool is_legal_sequence(const Mdp& m, const TeachingSequence& seq) {
    if (seq.steps.empty()) return seq.final_state == m.start();
    if (seq.steps.front().state != m.start()) return false;
    for (std::size_t t = 0; t < seq.steps.size(); ++t) {
        const StateId next = t + 1 < seq.steps.size() ? seq.steps[t + 1].state : seq.final_state;
        if (m.probability(seq.steps[t].state, seq.steps[t].action, next) <= 0.0) return false;
    }
    return true;
}

// Bitflip ----------------------------------------------------------------------

BitflipEnv::BitflipEnv(std::vector<double> p, std::uint64_t start) : p_(std::move(p)), start_(start) {
    if (p_.empty() || p_.size() > 63) throw std::invalid_argument("Bitflip needs 1..63 bits");
    for (double q : p_) {
        if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("shift probability outside [0, 1]");
    }
    if ((start & ~low_bits(p_.size())) != 0) throw std::invalid_argument("start state wider than the bit count");
}

std::uint64_t BitflipEnv::exposed(std::uint64_t state) const {
    const std::uint64_t incoming = (state << 1) & low_bits(bits());
    return (incoming ^ state) & low_bits(bits());
}

std::uint64_t BitflipEnv::step(std::uint64_t state, ActionId a, RandomSource& rng) const {
    if (a == kFlip0) return state ^ 1ULL;
    if (a != kShift) throw std::invalid_argument("Bitflip has actions flip0 and shift only");
    const std::uint64_t incoming = (state << 1) & low_bits(bits());
    std::uint64_t next = state;
    std::uint64_t moving = exposed(state);
    while (moving != 0) {
        const auto i = static_cast<std::size_t>(std::countr_zero(moving));
        moving &= moving - 1;
        const double q = p_[i];
        const bool success = q >= 1.0 || (q > 0.0 && rng.uniform() < q);
        if (success) next ^= (1ULL << i);
    }
    (void)incoming;
    return next;
}

std::vector<std::pair<std::uint64_t, double>> BitflipEnv::successors(std::uint64_t state, ActionId a) const {
    if (a == kFlip0) return {{state ^ 1ULL, 1.0}};
    if (a != kShift) throw std::invalid_argument("Bitflip has actions flip0 and shift only");
    // Bits with p = 1 always move; bits with 0 < p < 1 branch.
    std::uint64_t base = state;
    std::vector<std::size_t> branching;
    std::uint64_t moving = exposed(state);
    while (moving != 0) {
        const auto i = static_cast<std::size_t>(std::countr_zero(moving));
        moving &= moving - 1;
        if (p_[i] >= 1.0) {
            base ^= (1ULL << i);
        } else if (p_[i] > 0.0) {
            branching.push_back(i);
        }
    }
    std::vector<std::pair<std::uint64_t, double>> out;
    const std::size_t combos = std::size_t{1} << branching.size();
    for (std::size_t c = 0; c < combos; ++c) {
        std::uint64_t next = base;
        double prob = 1.0;
        for (std::size_t j = 0; j < branching.size(); ++j) {
            const std::size_t i = branching[j];
            if ((c >> j) & 1U) {
                next ^= (1ULL << i);
                prob *= p_[i];
            } else {
                prob *= 1.0 - p_[i];
            }
        }
        out.emplace_back(next, prob);
    }
    return out;
}

Mdp BitflipEnv::to_mdp() const {
    if (bits() > 20) throw std::length_error("tabular Bitflip limited to 20 bits");
    const std::size_t states = std::size_t{1} << bits();
    Mdp m(states, 2, static_cast<StateId>(start_));
    m.set_action_name(kFlip0, "flip0");
    m.set_action_name(kShift, "shift");
    for (std::size_t s = 0; s < states; ++s) {
        for (ActionId a : {kFlip0, kShift}) {
            std::vector<Transition> row;
            for (const auto& [next, prob] : successors(s, a)) row.push_back({static_cast<StateId>(next), prob});
            m.set_transitions(static_cast<StateId>(s), a, std::move(row));
        }
    }
    return m;
}

BitflipEnv make_sequential_bitflip(std::size_t n, std::span<const std::size_t> stochastic_bits, double p_stochastic) {
    std::vector<double> p(n, 1.0);
    for (std::size_t i : stochastic_bits) {
        if (i >= n) throw std::invalid_argument("stochastic bit index out of range");
        p[i] = p_stochastic;
    }
    return BitflipEnv(std::move(p));
}

// Taxi -------------------------------------------------------------------------

std::string_view to_string(TaxiSchema s) {
    switch (s) {
        case TaxiSchema::Up: return "up";
        case TaxiSchema::Down: return "down";
        case TaxiSchema::Left: return "left";
        case TaxiSchema::Right: return "right";
        case TaxiSchema::Pickup: return "pickup";
        case TaxiSchema::Dropoff: return "dropoff";
    }
    return "?";
}

TaxiSchema parse_taxi_schema(std::string_view name) {
    for (auto s : kTaxiSchemas) {
        if (to_string(s) == name) return s;
    }
    if (name == "putdown") return TaxiSchema::Dropoff;
    throw std::invalid_argument("unknown taxi action '" + std::string(name) + "'");
}

std::size_t schema_arity(TaxiSchema s) {
    return (s == TaxiSchema::Pickup || s == TaxiSchema::Dropoff) ? 3 : 1;
}

namespace {

constexpr ObjectId kTaxi = 0;
constexpr ObjectId kPassenger = 1;

std::vector<std::string> make_vocabulary(std::size_t arity) {
    std::vector<std::string> v;
    for (const char* d : {"N", "S", "E", "W"}) v.push_back(std::string("Wall") + d + "(a0)");
    for (const char* d : {"N", "S", "E", "W"}) v.push_back(std::string("Clear") + d + "(a0)");
    for (std::size_t j = 1; j < arity; ++j) v.push_back("On(a0,a" + std::to_string(j) + ")");
    for (std::size_t j = 1; j < arity; ++j) v.push_back("InTaxi(a" + std::to_string(j) + ")");
    for (std::size_t j = 1; j < arity; ++j) v.push_back("OutOfTaxi(a" + std::to_string(j) + ")");
    return v;
}

std::vector<std::string> default_precondition(TaxiSchema s) {
    switch (s) {
        case TaxiSchema::Up: return {"ClearN(a0)"};
        case TaxiSchema::Down: return {"ClearS(a0)"};
        case TaxiSchema::Left: return {"ClearW(a0)"};
        case TaxiSchema::Right: return {"ClearE(a0)"};
        case TaxiSchema::Pickup: return {"On(a0,a1)", "On(a0,a2)", "OutOfTaxi(a1)"};
        case TaxiSchema::Dropoff: return {"InTaxi(a1)", "On(a0,a2)"};
    }
    return {};
}

bool inside(const TaxiConfig& c, Cell p) { return p.x >= 0 && p.y >= 0 && p.x < c.width && p.y < c.height; }

}  // namespace

TaxiEnv::TaxiEnv(TaxiConfig config) : config_(std::move(config)) {
    if (config_.width < 1 || config_.height < 1) throw std::invalid_argument("taxi grid must be non-empty");
    if (config_.landmarks.size() < 2) throw std::invalid_argument("taxi needs at least two landmarks");
    for (std::size_t i = 0; i < config_.landmarks.size(); ++i) {
        if (!inside(config_, config_.landmarks[i])) throw std::invalid_argument("landmark outside the grid");
        for (std::size_t j = 0; j < i; ++j) {
            if (config_.landmarks[i] == config_.landmarks[j]) throw std::invalid_argument("landmarks must be distinct");
        }
    }
    if (!inside(config_, config_.taxi_start)) throw std::invalid_argument("taxi start outside the grid");
    if (config_.passenger_start >= config_.landmarks.size() || config_.destination >= config_.landmarks.size()) {
        throw std::invalid_argument("passenger start and destination must name landmarks");
    }

    for (auto s : kTaxiSchemas) vocab_[static_cast<std::size_t>(s)] = make_vocabulary(schema_arity(s));

    for (auto s : {TaxiSchema::Up, TaxiSchema::Down, TaxiSchema::Left, TaxiSchema::Right}) {
        actions_.push_back({s, {kTaxi}});
    }
    for (auto s : {TaxiSchema::Pickup, TaxiSchema::Dropoff}) {
        for (ObjectId a1 = 1; a1 < num_objects(); ++a1) {
            for (ObjectId a2 = 1; a2 < num_objects(); ++a2) {
                if (a1 != a2) actions_.push_back({s, {kTaxi, a1, a2}});
            }
        }
    }

    for (auto s : kTaxiSchemas) {
        std::vector<std::string> names = default_precondition(s);
        for (const auto& [schema, override_names] : config_.preconditions) {
            if (schema == s) names = override_names;
        }
        std::uint64_t mask = 0;
        for (const auto& name : names) mask |= 1ULL << predicate_index(s, name);
        preconditions_.emplace_back(vocabulary(s).size(), mask);
    }
}

std::string TaxiEnv::object_name(ObjectId o) const {
    if (o == kTaxi) return "taxi";
    if (o == kPassenger) return "passenger";
    if (o < num_objects()) return "L" + std::to_string(o - 2);
    throw std::out_of_range("unknown taxi object");
}

std::size_t TaxiEnv::num_states() const {
    return static_cast<std::size_t>(config_.width * config_.height) * (config_.landmarks.size() + 1);
}

StateId TaxiEnv::encode(const TaxiState& s) const {
    if (!inside(config_, s.taxi) || s.passenger > config_.landmarks.size()) {
        throw std::invalid_argument("taxi state out of range");
    }
    const std::size_t cell = static_cast<std::size_t>(s.taxi.y * config_.width + s.taxi.x);
    return static_cast<StateId>(cell * (config_.landmarks.size() + 1) + s.passenger);
}

TaxiState TaxiEnv::decode(StateId id) const {
    if (id >= num_states()) throw std::out_of_range("taxi state id out of range");
    const std::size_t slots = config_.landmarks.size() + 1;
    const std::size_t cell = id / slots;
    TaxiState s;
    s.passenger = id % slots;
    s.taxi = {static_cast<int>(cell % static_cast<std::size_t>(config_.width)),
              static_cast<int>(cell / static_cast<std::size_t>(config_.width))};
    return s;
}

TaxiState TaxiEnv::start_state() const { return {config_.taxi_start, config_.passenger_start}; }

std::string TaxiEnv::action_name(ActionId a) const {
    const auto& g = actions_.at(a);
    std::string out(to_string(g.schema));
    out += "(";
    for (std::size_t i = 0; i < g.args.size(); ++i) {
        if (i) out += ",";
        out += object_name(g.args[i]);
    }
    return out + ")";
}

const std::vector<std::string>& TaxiEnv::vocabulary(TaxiSchema s) const {
    return vocab_[static_cast<std::size_t>(s)];
}

std::size_t TaxiEnv::predicate_index(TaxiSchema s, std::string_view name) const {
    const auto& v = vocabulary(s);
    auto it = std::find(v.begin(), v.end(), name);
    if (it == v.end()) {
        throw std::invalid_argument("predicate '" + std::string(name) + "' is not in the " +
                                    std::string(to_string(s)) + " vocabulary");
    }
    return static_cast<std::size_t>(it - v.begin());
}

Cell TaxiEnv::position(const TaxiState& s, ObjectId o) const {
    if (o == kTaxi) return s.taxi;
    if (o == kPassenger) {
        return s.passenger == config_.landmarks.size() ? s.taxi : config_.landmarks[s.passenger];
    }
    return config_.landmarks.at(o - 2);
}

bool TaxiEnv::on_grid(const TaxiState& s, ObjectId o) const {
    return !(o == kPassenger && s.passenger == config_.landmarks.size());
}

GroundedInstance TaxiEnv::ground_predicates(const TaxiState& s, TaxiSchema schema,
                                            std::span<const ObjectId> binding) const {
    const std::size_t arity = schema_arity(schema);
    if (binding.size() != arity) {
        throw std::invalid_argument(std::string(to_string(schema)) + " takes " + std::to_string(arity) +
                                    " arguments, got " + std::to_string(binding.size()));
    }
    for (ObjectId o : binding) {
        if (o >= num_objects()) throw std::invalid_argument("binding names an unknown object");
    }
    BitString x(vocabulary(schema).size());
    std::size_t i = 0;
    const Cell p0 = position(s, binding[0]);
    const bool wall[4] = {p0.y == config_.height - 1, p0.y == 0, p0.x == config_.width - 1, p0.x == 0};
    for (bool w : wall) x.set(i++, w);
    for (bool w : wall) x.set(i++, !w);
    const bool riding = s.passenger == config_.landmarks.size();
    for (std::size_t j = 1; j < arity; ++j) {
        const ObjectId o = binding[j];
        x.set(i++, on_grid(s, binding[0]) && on_grid(s, o) && position(s, o) == p0);
    }
    for (std::size_t j = 1; j < arity; ++j) x.set(i++, binding[j] == kPassenger && riding);
    for (std::size_t j = 1; j < arity; ++j) x.set(i++, binding[j] == kPassenger && !riding);

    GroundedInstance out{{schema, std::vector<ObjectId>(binding.begin(), binding.end())}, x};
    return out;
}

GroundedInstance TaxiEnv::ground_predicates(const TaxiState& s, ActionId a) const {
    const auto& g = actions_.at(a);
    return ground_predicates(s, g.schema, g.args);
}

const MonotoneConjunction& TaxiEnv::precondition(TaxiSchema s) const {
    return preconditions_[static_cast<std::size_t>(s)];
}

TaxiStep TaxiEnv::step(const TaxiState& s, ActionId a) const {
    const auto& g = actions_.at(a);
    const auto inst = ground_predicates(s, g.schema, g.args);
    const Label label = conjunction_label(precondition(g.schema), inst.predicates);
    TaxiStep out{s, 0.0, label};
    if (label == 0) return out;

    const std::size_t riding = config_.landmarks.size();
    Cell next = s.taxi;
    switch (g.schema) {
        case TaxiSchema::Up: ++next.y; break;
        case TaxiSchema::Down: --next.y; break;
        case TaxiSchema::Right: ++next.x; break;
        case TaxiSchema::Left: --next.x; break;
        case TaxiSchema::Pickup:
            if (g.args[1] == kPassenger && s.passenger != riding) out.next.passenger = riding;
            return out;
        case TaxiSchema::Dropoff:
            if (g.args[1] == kPassenger && s.passenger == riding && g.args[2] >= 2 &&
                config_.landmarks[g.args[2] - 2] == s.taxi) {
                out.next.passenger = g.args[2] - 2;
            }
            return out;
    }
    if (inside(config_, next)) out.next.taxi = next;
    return out;
}

Mdp TaxiEnv::to_mdp() const {
    Mdp m(num_states(), actions_.size(), encode(start_state()));
    for (ActionId a = 0; a < actions_.size(); ++a) m.set_action_name(a, action_name(a));
    for (StateId id = 0; id < num_states(); ++id) {
        const TaxiState s = decode(id);
        for (ActionId a = 0; a < actions_.size(); ++a) {
            m.set_transitions(id, a, {Transition{encode(step(s, a).next), 1.0}});
        }
    }
    return m;
}

}  // namespace mteach
