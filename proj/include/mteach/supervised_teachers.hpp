#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mteach/concepts.hpp"
#include "mteach/core.hpp"

namespace mteach {

struct TeachingOutcome {
    TeachingCollection collection;
    /// Samples for individual strategies, pulls/probes for parallel ones.
    std::uint64_t steps = 0;
    /// Total labeled samples delivered (steps * k for parallel pulls).
    std::uint64_t samples = 0;
    bool stopped_early = false;
    /// Samples delivered per taught parameter (arm index or condition key).
    std::map<Input, std::uint64_t> per_condition_steps;
    FactorEstimate estimate;
};

/// Teacher-side stop test: the true parameter lies in the closed interval
/// [p_hat - half_width, p_hat + half_width], or the cap was reached.
struct StopRule {
    double half_width;
    std::uint64_t cap;

    StopRule(double half_width, std::uint64_t cap);

    bool within(const Tally& t, double truth) const;
    bool exhausted(const Tally& t) const { return t.count >= cap; }
    bool satisfied(const Tally& t, double truth) const { return exhausted(t) || within(t, truth); }
};

// Conjunctions ---------------------------------------------------------------

/// Most specific positive example followed by one negative per relevant
/// variable (that variable alone zeroed).
std::vector<Example> teach_conjunction_td(const MonotoneConjunction& c);

/// The single most specific positive example.
Example teach_conjunction_std(const MonotoneConjunction& c);

/// Subset-teaching learner: the relevant set is exactly the 1-bits of the
/// positive example it was shown. Throws std::invalid_argument on negatives.
MonotoneConjunction std_infer(const Example& e);

// Coins ------------------------------------------------------------------------

TeachingOutcome teach_coin_ntd(const BernoulliConcept& c, const AccuracyParams& params, RandomSource& rng);
TeachingOutcome teach_coin_nstd(const BernoulliConcept& c, const AccuracyParams& params, RandomSource& rng);

// Bandits ----------------------------------------------------------------------

enum class BanditStrategy { NtdInd, NstdInd, NtdPar, NstdPar };

std::string_view to_string(BanditStrategy s);
BanditStrategy parse_bandit_strategy(std::string_view name);

/// `arm_order` sets the visiting order for NSTD-IND; ascending when empty.
TeachingOutcome teach_bandit(BanditStrategy strategy, const BanditConcept& c, const AccuracyParams& params,
                             RandomSource& rng, std::span<const std::size_t> arm_order = {});

// DBNs -------------------------------------------------------------------------

enum class DbnStrategy { Ntd, NstdPar, NstdInd };

std::string_view to_string(DbnStrategy s);
DbnStrategy parse_dbn_strategy(std::string_view name);

/// How a DBN teacher builds its inputs.
///
/// The parallel and individual strategies may reach the same unknown
/// parameter through different conditions (Bitflip exposes p_i either as
/// "lower bit 1, bit i 0" or the reverse), so each keeps its own target list.
struct DbnProbePlan {
    struct Individual {
        BitString probe;
        DbnCondition target;
    };

    /// Input exposing every parallel target at once (NTD, NSTD-PAR).
    BitString parallel_probe;
    std::vector<DbnCondition> parallel_targets;
    /// Each probe exposes its target and no other target (NSTD-IND).
    std::vector<Individual> individual;
    /// k in the confidence split delta / n^k.
    std::size_t confidence_arity = 1;
};

/// Bitflip plan: the alternating string with bit 0 set for parallel probes;
/// for bit j, zeros below j and ones from j upward.
DbnProbePlan bitflip_probe_plan(const DbnConcept& bitflip);

/// Raised when a probe plan cannot expose the conditions it claims to teach.
class unteachable_under_plan : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void validate_probe_plan(const DbnConcept& c, const DbnProbePlan& plan);

/// Per-condition accuracy/confidence for an n-factor DBN: (eps/n, delta/n^k).
AccuracyParams dbn_condition_params(const AccuracyParams& params, std::size_t n, std::size_t confidence_arity);

TeachingOutcome teach_dbn(DbnStrategy strategy, const DbnConcept& c, const DbnProbePlan& plan,
                          const AccuracyParams& params, RandomSource& rng);

/// Deterministic known-structure DBN with one non-self parent per factor:
/// the base input and its complement expose both values of every parent.
std::vector<BitString> teach_dbn_deterministic(const DbnConcept& c, const BitString& base);

/// Learner for deterministic DBNs: reads each observed (state, next) pair into
/// the CPT. Throws incomplete_teaching if some condition was never observed.
DbnConcept learn_deterministic_dbn(const std::vector<std::vector<std::size_t>>& structure,
                                   const std::vector<std::pair<BitString, BitString>>& transitions);

}  // namespace mteach
