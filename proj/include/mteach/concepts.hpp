#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mteach/core.hpp"

namespace mteach {

/// Fixed-width boolean vector of at most 64 bits. Character i of the textual
/// form is bit i, so "011" has bits 1 and 2 set.
class BitString {
public:
    static constexpr std::size_t kMaxWidth = 64;

    BitString() = default;
    explicit BitString(std::size_t width, std::uint64_t mask = 0);
    static BitString parse(std::string_view text);

    std::size_t size() const { return width_; }
    std::uint64_t mask() const { return mask_; }
    bool operator[](std::size_t i) const { return (mask_ >> i) & 1ULL; }
    void set(std::size_t i, bool value);
    BitString complement() const;
    std::size_t count() const;
    std::string to_string() const;

    auto operator<=>(const BitString&) const = default;

private:
    std::uint64_t mask_ = 0;
    std::size_t width_ = 0;
};

std::uint64_t low_bits(std::size_t width);

/// A labeled boolean vector, the instance type of conjunction teaching.
struct Example {
    BitString input;
    Label label;

    bool operator==(const Example&) const = default;
};

class MonotoneConjunction {
public:
    MonotoneConjunction(std::size_t n, std::uint64_t relevant_mask);
    MonotoneConjunction(std::size_t n, std::initializer_list<std::size_t> relevant);

    std::size_t size() const { return n_; }
    std::uint64_t relevant() const { return relevant_; }
    bool is_relevant(std::size_t i) const { return (relevant_ >> i) & 1ULL; }
    std::vector<std::size_t> relevant_indices() const;

    bool operator==(const MonotoneConjunction&) const = default;

private:
    std::size_t n_;
    std::uint64_t relevant_;
};

/// 1 iff every relevant variable of x is 1. Throws on width mismatch.
Label conjunction_label(const MonotoneConjunction& c, const BitString& x);

/// Raised when a sample stream leaves no consistent hypothesis.
class inconsistent_samples : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Version space over monotone conjunctions.
///
/// Positive examples can only shrink the set of admissible relevant
/// variables, so they collapse into a single upper bound U (the intersection
/// of their 1-bits). A negative example with zero-set Z admits exactly the
/// hypotheses R with R ∩ Z non-empty. The candidates are therefore
/// { R ⊆ U : R ∩ Z_j ≠ ∅ for every negative j }, which is stored exactly as U
/// plus the list of zero-sets.
class VersionSpace {
public:
    /// Every conjunction over n variables.
    explicit VersionSpace(std::size_t n);

    std::size_t size() const { return n_; }
    std::uint64_t upper_bound() const { return upper_; }
    const std::vector<std::uint64_t>& negative_zero_sets() const { return negatives_; }

    bool contains(const MonotoneConjunction& c) const;
    bool empty() const;
    /// True when exactly one conjunction remains.
    bool is_taught() const;
    /// The remaining conjunction when taught.
    std::optional<MonotoneConjunction> unique() const;

    /// Explicit enumeration; requires popcount(upper_bound) <= 24.
    std::vector<MonotoneConjunction> candidates() const;
    std::size_t candidate_count() const { return candidates().size(); }

    void apply(const Example& e);

private:
    std::size_t n_;
    std::uint64_t upper_;
    std::vector<std::uint64_t> negatives_;
};

/// Returns the candidates consistent with `e`; throws inconsistent_samples
/// if none remain.
VersionSpace version_space_update(VersionSpace vs, const Example& e);

/// Canonical distribution-consistent learner: predicts the MLE of the labels
/// observed at `input`.
LabelDistribution mle_predict(const TeachingCollection& u, Input input);

struct BernoulliConcept {
    double p_star;

    explicit BernoulliConcept(double p);
};

struct BanditConcept {
    std::vector<double> mean;

    explicit BanditConcept(std::vector<double> means);
    std::size_t arms() const { return mean.size(); }
};

/// (factor, parent assignment) pair. Bit j of `assignment` is the value of
/// the factor's j-th parent.
struct DbnCondition {
    std::size_t factor = 0;
    std::uint32_t assignment = 0;

    auto operator<=>(const DbnCondition&) const = default;
};

Input condition_key(const DbnCondition& c);
DbnCondition condition_from_key(Input key);

/// Binary-factor DBN with known structure. cpt(i, a) is
/// P(factor i = 1 at t+1 | parents of i take assignment a at t).
class DbnConcept {
public:
    DbnConcept(std::vector<std::vector<std::size_t>> parents, std::vector<std::vector<double>> cpt);

    std::size_t size() const { return parents_.size(); }
    const std::vector<std::size_t>& parents(std::size_t factor) const { return parents_.at(factor); }
    const std::vector<std::vector<std::size_t>>& structure() const { return parents_; }
    const std::vector<std::vector<double>>& cpt() const { return cpt_; }
    double probability(const DbnCondition& c) const;
    bool is_deterministic(const DbnCondition& c) const;

    DbnCondition condition_at(std::size_t factor, const BitString& state) const;

    /// Largest number of parents other than the factor itself.
    std::size_t k_par() const;

private:
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<double>> cpt_;
};

/// Per-factor P(factor = 1) at the next step. Throws on width mismatch.
std::vector<double> dbn_next_state_distribution(const DbnConcept& c, const BitString& state);

BitString dbn_sample_next(const DbnConcept& c, const BitString& state, RandomSource& rng);

/// The Bitflip shift action as a DBN: factor i reads (bit i-1, bit i), with a
/// constant 0 feeding bit 0. A shift succeeds at bit i with probability p[i];
/// on failure the bit keeps its value.
DbnConcept make_bitflip_dbn(std::span<const double> p);

/// Success/trial counts per taught parameter (arm index or condition key).
class FactorEstimate {
public:
    void record(Input key, bool success) { tallies_[key].record(success); }
    void add(Input key, const Tally& t) {
        auto& dst = tallies_[key];
        dst.count += t.count;
        dst.successes += t.successes;
    }
    const Tally* find(Input key) const;
    const std::map<Input, Tally>& tallies() const { return tallies_; }

private:
    std::map<Input, Tally> tallies_;
};

/// Raised when an error is requested for a parameter that has no samples.
class incomplete_teaching : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Max over arms of |mean_hat - mean|.
double aggregate_model_error(const FactorEstimate& estimate, const BanditConcept& truth);

/// Max over the listed conditions of |P_hat - P|.
double aggregate_model_error(const FactorEstimate& estimate, const DbnConcept& truth,
                             std::span<const DbnCondition> conditions);

/// Per-condition error budget for an n-factor DBN with aggregate accuracy eps.
inline bool within_dbn_budget(double condition_error, std::size_t n, double epsilon) {
    return condition_error <= epsilon / static_cast<double>(n);
}

}  // namespace mteach
