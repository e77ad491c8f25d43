#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mteach/random.hpp"

namespace mteach {

using Label = int;
/// Opaque instance identifier. Callers choose the encoding (arm index,
/// condition key, bit mask, ...).
using Input = std::uint64_t;

/// Raised when a learner is queried on an input it has never seen.
class undefined_distribution : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The (epsilon, delta) pair of a noisy teaching protocol.
class AccuracyParams {
public:
    AccuracyParams(double epsilon, double delta);

    double epsilon() const { return epsilon_; }
    double delta() const { return delta_; }

private:
    double epsilon_;
    double delta_;
};

class LabelDistribution {
public:
    /// Probabilities must be non-negative and sum to one within 1e-12.
    explicit LabelDistribution(std::map<Label, double> prob);

    static LabelDistribution point_mass(Label y);

    /// Zero for labels outside the support.
    double prob(Label y) const;
    const std::map<Label, double>& probabilities() const { return prob_; }

private:
    std::map<Label, double> prob_;
};

struct Sample {
    Input input;
    Label label;
};

/// Unordered multiset of samples. Only per-input label counts are stored, so
/// insertion order is unrecoverable by construction.
class TeachingCollection {
public:
    void add(const Sample& s, std::uint64_t multiplicity = 1);
    void add(Input input, Label label, std::uint64_t multiplicity = 1) {
        add(Sample{input, label}, multiplicity);
    }

    std::uint64_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    std::uint64_t count(Input input) const;
    std::uint64_t count(Input input, Label label) const;
    std::vector<Input> inputs() const;
    const std::map<Label, std::uint64_t>& label_counts(Input input) const;

    bool operator==(const TeachingCollection&) const = default;

private:
    std::map<Input, std::map<Label, std::uint64_t>> counts_;
    std::uint64_t size_ = 0;
};

/// Success/trial counts for one Bernoulli parameter.
struct Tally {
    std::uint64_t count = 0;
    std::uint64_t successes = 0;

    void record(bool success) {
        ++count;
        successes += success ? 1 : 0;
    }
    /// Empirical mean; zero-count tallies report NaN.
    double mean() const;
};

/// H(eps, delta) = ceil(ln(2/delta) / (2 eps^2)).
std::uint64_t hoeffding_samples(const AccuracyParams& params);

double tv_distance(const LabelDistribution& a, const LabelDistribution& b);

/// Maximum-likelihood label distribution at `input`; throws
/// undefined_distribution when the collection has no sample there.
LabelDistribution empirical_distribution(const TeachingCollection& u, Input input);

int bernoulli_sample(double p, RandomSource& rng);

}  // namespace mteach
