#include "mteach/concepts.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mteach {

std::uint64_t low_bits(std::size_t width) {
    return width >= 64 ? ~0ULL : ((1ULL << width) - 1ULL);
}

BitString::BitString(std::size_t width, std::uint64_t mask) : mask_(mask), width_(width) {
    if (width > kMaxWidth) throw std::invalid_argument("bit string wider than 64 bits");
    if ((mask & ~low_bits(width)) != 0) throw std::invalid_argument("bit string mask exceeds its width");
}

BitString BitString::parse(std::string_view text) {
    BitString out(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            out.set(i, true);
        } else if (text[i] != '0') {
            throw std::invalid_argument("bit string may only contain '0' and '1'");
        }
    }
    return out;
}

void BitString::set(std::size_t i, bool value) {
    if (i >= width_) throw std::out_of_range("bit index out of range");
    if (value) {
        mask_ |= (1ULL << i);
    } else {
        mask_ &= ~(1ULL << i);
    }
}

BitString BitString::complement() const { return BitString(width_, ~mask_ & low_bits(width_)); }

std::size_t BitString::count() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::string BitString::to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i) {
        if ((*this)[i]) s[i] = '1';
    }
    return s;
}

MonotoneConjunction::MonotoneConjunction(std::size_t n, std::uint64_t relevant_mask)
    : n_(n), relevant_(relevant_mask) {
    if (n > BitString::kMaxWidth) throw std::invalid_argument("conjunction over more than 64 variables");
    if ((relevant_mask & ~low_bits(n)) != 0) {
        throw std::invalid_argument("relevant variable index out of range");
    }
}

MonotoneConjunction::MonotoneConjunction(std::size_t n, std::initializer_list<std::size_t> relevant)
    : n_(n), relevant_(0) {
    for (std::size_t i : relevant) {
        if (i >= n) throw std::invalid_argument("relevant variable index out of range");
        relevant_ |= 1ULL << i;
    }
}

std::vector<std::size_t> MonotoneConjunction::relevant_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
        if (is_relevant(i)) out.push_back(i);
    }
    return out;
}

Label conjunction_label(const MonotoneConjunction& c, const BitString& x) {
    if (x.size() != c.size()) throw std::invalid_argument("input width does not match conjunction");
    return (x.mask() & c.relevant()) == c.relevant() ? 1 : 0;
}

VersionSpace::VersionSpace(std::size_t n) : n_(n), upper_(low_bits(n)) {
    if (n > BitString::kMaxWidth) throw std::invalid_argument("version space over more than 64 variables");
}

bool VersionSpace::contains(const MonotoneConjunction& c) const {
    if (c.size() != n_) return false;
    if ((c.relevant() & ~upper_) != 0) return false;
    return std::all_of(negatives_.begin(), negatives_.end(),
                       [&](std::uint64_t z) { return (c.relevant() & z) != 0; });
}

bool VersionSpace::empty() const {
    // U is the largest candidate; if it violates a negative, every subset does.
    return std::any_of(negatives_.begin(), negatives_.end(),
                       [&](std::uint64_t z) { return (upper_ & z) == 0; });
}

bool VersionSpace::is_taught() const {
    if (empty()) return false;
    // Every proper subset of U lies inside some U \ {v}; U is the sole
    // candidate iff each U \ {v} misses some negative zero-set.
    for (std::size_t v = 0; v < n_; ++v) {
        const std::uint64_t bit = 1ULL << v;
        if ((upper_ & bit) == 0) continue;
        const bool pinned = std::any_of(negatives_.begin(), negatives_.end(),
                                        [&](std::uint64_t z) { return (z & upper_) == bit; });
        if (!pinned) return false;
    }
    return true;
}

std::optional<MonotoneConjunction> VersionSpace::unique() const {
    if (!is_taught()) return std::nullopt;
    return MonotoneConjunction(n_, upper_);
}

std::vector<MonotoneConjunction> VersionSpace::candidates() const {
    const int free_bits = std::popcount(upper_);
    if (free_bits > 24) throw std::length_error("version space too large to enumerate");
    std::vector<MonotoneConjunction> out;
    // Enumerate submasks of U in increasing order.
    std::uint64_t sub = 0;
    while (true) {
        MonotoneConjunction c(n_, sub);
        if (contains(c)) out.push_back(c);
        if (sub == upper_) break;
        sub = (sub - upper_) & upper_;
    }
    return out;
}

void VersionSpace::apply(const Example& e) {
    if (e.input.size() != n_) throw std::invalid_argument("example width does not match version space");
    if (e.label == 1) {
        upper_ &= e.input.mask();
    } else if (e.label == 0) {
        negatives_.push_back(~e.input.mask() & low_bits(n_));
    } else {
        throw std::invalid_argument("conjunction labels must be 0 or 1");
    }
    if (empty()) throw inconsistent_samples("no monotone conjunction is consistent with the samples");
}

VersionSpace version_space_update(VersionSpace vs, const Example& e) {
    vs.apply(e);
    return vs;
}

LabelDistribution mle_predict(const TeachingCollection& u, Input input) {
    return empirical_distribution(u, input);
}

BernoulliConcept::BernoulliConcept(double p) : p_star(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("coin bias outside [0, 1]");
}

BanditConcept::BanditConcept(std::vector<double> means) : mean(std::move(means)) {
    if (mean.empty()) throw std::invalid_argument("bandit needs at least one arm");
    for (double m : mean) {
        if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("arm mean outside [0, 1]");
    }
}

Input condition_key(const DbnCondition& c) {
    return (static_cast<Input>(c.factor) << 32) | c.assignment;
}

DbnCondition condition_from_key(Input key) {
    return DbnCondition{static_cast<std::size_t>(key >> 32), static_cast<std::uint32_t>(key & 0xffffffffULL)};
}

DbnConcept::DbnConcept(std::vector<std::vector<std::size_t>> parents, std::vector<std::vector<double>> cpt)
    : parents_(std::move(parents)), cpt_(std::move(cpt)) {
    const std::size_t n = parents_.size();
    if (n == 0 || n > BitString::kMaxWidth) throw std::invalid_argument("DBN needs 1..64 factors");
    if (cpt_.size() != n) throw std::invalid_argument("one CPT per factor required");
    for (std::size_t i = 0; i < n; ++i) {
        if (parents_[i].size() > 16) throw std::invalid_argument("too many parents");
        for (std::size_t p : parents_[i]) {
            if (p >= n) throw std::invalid_argument("parent index out of range");
        }
        if (cpt_[i].size() != (std::size_t{1} << parents_[i].size())) {
            throw std::invalid_argument("CPT must cover every parent assignment");
        }
        for (double q : cpt_[i]) {
            if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("CPT entry outside [0, 1]");
        }
    }
}

double DbnConcept::probability(const DbnCondition& c) const { return cpt_.at(c.factor).at(c.assignment); }

bool DbnConcept::is_deterministic(const DbnCondition& c) const {
    const double q = probability(c);
    return q == 0.0 || q == 1.0;
}

DbnCondition DbnConcept::condition_at(std::size_t factor, const BitString& state) const {
    if (state.size() != size()) throw std::invalid_argument("state width does not match DBN");
    std::uint32_t a = 0;
    const auto& ps = parents_.at(factor);
    for (std::size_t j = 0; j < ps.size(); ++j) {
        if (state[ps[j]]) a |= 1U << j;
    }
    return DbnCondition{factor, a};
}

std::size_t DbnConcept::k_par() const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < parents_.size(); ++i) {
        auto others = static_cast<std::size_t>(
            std::count_if(parents_[i].begin(), parents_[i].end(), [&](std::size_t p) { return p != i; }));
        k = std::max(k, others);
    }
    return k;
}

std::vector<double> dbn_next_state_distribution(const DbnConcept& c, const BitString& state) {
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c.probability(c.condition_at(i, state));
    return out;
}

BitString dbn_sample_next(const DbnConcept& c, const BitString& state, RandomSource& rng) {
    BitString next(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        next.set(i, bernoulli_sample(c.probability(c.condition_at(i, state)), rng) == 1);
    }
    return next;
}

DbnConcept make_bitflip_dbn(std::span<const double> p) {
    const std::size_t n = p.size();
    std::vector<std::vector<std::size_t>> parents(n);
    std::vector<std::vector<double>> cpt(n);
    // Bit 0 reads only itself; the incoming value is the constant 0.
    parents[0] = {0};
    cpt[0] = {0.0, 1.0 - p[0]};
    for (std::size_t i = 1; i < n; ++i) {
        parents[i] = {i - 1, i};
        // assignment = (bit i-1) | (bit i) << 1
        cpt[i] = {0.0, p[i], 1.0 - p[i], 1.0};
    }
    return DbnConcept(std::move(parents), std::move(cpt));
}

const Tally* FactorEstimate::find(Input key) const {
    auto it = tallies_.find(key);
    return it == tallies_.end() ? nullptr : &it->second;
}

double aggregate_model_error(const FactorEstimate& estimate, const BanditConcept& truth) {
    double worst = 0.0;
    for (std::size_t arm = 0; arm < truth.arms(); ++arm) {
        const Tally* t = estimate.find(arm);
        if (t == nullptr || t->count == 0) {
            throw incomplete_teaching("arm " + std::to_string(arm) + " was never pulled");
        }
        worst = std::max(worst, std::abs(t->mean() - truth.mean[arm]));
    }
    return worst;
}

double aggregate_model_error(const FactorEstimate& estimate, const DbnConcept& truth,
                             std::span<const DbnCondition> conditions) {
    double worst = 0.0;
    for (const auto& c : conditions) {
        const Tally* t = estimate.find(condition_key(c));
        if (t == nullptr || t->count == 0) {
            throw incomplete_teaching("condition of factor " + std::to_string(c.factor) + " was never observed");
        }
        worst = std::max(worst, std::abs(t->mean() - truth.probability(c)));
    }
    return worst;
}

}  // namespace mteach
