#include "mteach/core.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace mteach {

AccuracyParams::AccuracyParams(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(delta));
    }
}

LabelDistribution::LabelDistribution(std::map<Label, double> prob) : prob_(std::move(prob)) {
    if (prob_.empty()) throw std::invalid_argument("label distribution needs a non-empty support");
    double total = 0.0;
    for (const auto& [label, p] : prob_) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative label probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("label probabilities sum to " + std::to_string(total));
    }
}

LabelDistribution LabelDistribution::point_mass(Label y) { return LabelDistribution({{y, 1.0}}); }

double LabelDistribution::prob(Label y) const {
    auto it = prob_.find(y);
    return it == prob_.end() ? 0.0 : it->second;
}

void TeachingCollection::add(const Sample& s, std::uint64_t multiplicity) {
    if (multiplicity == 0) return;
    counts_[s.input][s.label] += multiplicity;
    size_ += multiplicity;
}

std::uint64_t TeachingCollection::count(Input input) const {
    auto it = counts_.find(input);
    if (it == counts_.end()) return 0;
    std::uint64_t n = 0;
    for (const auto& [label, c] : it->second) n += c;
    return n;
}

std::uint64_t TeachingCollection::count(Input input, Label label) const {
    auto it = counts_.find(input);
    if (it == counts_.end()) return 0;
    auto jt = it->second.find(label);
    return jt == it->second.end() ? 0 : jt->second;
}

std::vector<Input> TeachingCollection::inputs() const {
    std::vector<Input> out;
    out.reserve(counts_.size());
    for (const auto& [input, labels] : counts_) out.push_back(input);
    return out;
}

const std::map<Label, std::uint64_t>& TeachingCollection::label_counts(Input input) const {
    auto it = counts_.find(input);
    if (it == counts_.end()) {
        throw undefined_distribution("no samples for input " + std::to_string(input));
    }
    return it->second;
}

double Tally::mean() const {
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(successes) / static_cast<double>(count);
}

std::uint64_t hoeffding_samples(const AccuracyParams& params) {
    const long double eps = params.epsilon();
    const long double m = std::log(2.0L / static_cast<long double>(params.delta())) / (2.0L * eps * eps);
    return static_cast<std::uint64_t>(std::ceil(m));
}

double tv_distance(const LabelDistribution& a, const LabelDistribution& b) {
    std::set<Label> support;
    for (const auto& [y, p] : a.probabilities()) support.insert(y);
    for (const auto& [y, p] : b.probabilities()) support.insert(y);
    double l1 = 0.0;
    for (Label y : support) l1 += std::abs(a.prob(y) - b.prob(y));
    return 0.5 * l1;
}

LabelDistribution empirical_distribution(const TeachingCollection& u, Input input) {
    const auto& counts = u.label_counts(input);
    std::uint64_t total = 0;
    for (const auto& [y, c] : counts) total += c;
    std::map<Label, double> prob;
    // Normalize the last label by complement so the sum is exactly one.
    double assigned = 0.0;
    std::size_t i = 0;
    for (const auto& [y, c] : counts) {
        double p = (++i == counts.size()) ? 1.0 - assigned
                                          : static_cast<double>(c) / static_cast<double>(total);
        prob.emplace(y, p);
        assigned += p;
    }
    return LabelDistribution(std::move(prob));
}

int bernoulli_sample(double p, RandomSource& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli parameter outside [0, 1]");
    return rng.uniform() < p ? 1 : 0;
}

}  // namespace mteach
