#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace mteach {

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// The i-th output is a SplitMix64 finalizer applied to `key + i * golden`, so
/// a stream depends only on its key and position. Two trials that share a
/// master seed but use different stream ids never observe each other's draws,
/// which keeps Monte Carlo results independent of thread scheduling.
class RandomSource {
public:
    using result_type = std::uint64_t;

    RandomSource(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    result_type operator()() { return next_u64(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t position() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

/// FNV-1a over the bytes of a tag, finalized with mix64.
std::uint64_t hash_tag(std::string_view tag);

/// Order-sensitive combination of stream key components.
std::uint64_t combine_keys(std::uint64_t a, std::uint64_t b);

template <typename... Rest>
std::uint64_t stream_key(std::uint64_t first, Rest... rest) {
    std::uint64_t key = mix64(first);
    ((key = combine_keys(key, static_cast<std::uint64_t>(rest))), ...);
    return key;
}

}  // namespace mteach
