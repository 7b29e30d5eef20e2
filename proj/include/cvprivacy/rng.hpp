#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cvprivacy {

/// Counter-based generator: the k-th output of stream s under seed x is a
/// fixed hash of (x, s, k), so streams can be handed to workers and replayed
/// independently. Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform double in [0, 1).
    double uniform();
    double normal();
    bool bit();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// A generator on a different stream under the same seed.
    CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, stream); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Default seed used when neither a flag nor CVPRIVACY_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 20050101;

}  // namespace cvprivacy
