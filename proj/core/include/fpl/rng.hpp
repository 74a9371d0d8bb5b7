#pragma once
// Seeded counter-based randomness.
//
// Every random draw in this project comes from SplitMix64 streams. A stream
// is a 64-bit counter pushed through the SplitMix64 finalizer, so the k-th
// output of a stream is a pure function of (seed, k) and is identical on
// every platform and every run. Substreams for (replica, round, component)
// are derived by hash-chaining labels into the seed, which gives replicas
// and rounds disjoint streams without any shared state.

#include <cstdint>
#include <cmath>

namespace fpl::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Hash-chain a label into a seed. derive(derive(s, a), b) != derive(derive(s, b), a)
// in general, so label order defines the substream path.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t label) {
    return mix64(seed ^ (kGolden + label * 0xbf58476d1ce4e5b9ull));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
}

class Stream {
public:
    explicit constexpr Stream(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGolden);
        return mix64(z);
    }

    // Uniform on (0,1]: 53 random mantissa bits, shifted away from zero so
    // that -log(u) below is always finite.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Exp(1) by inverse CDF.
    double exponential() { return -std::log(uniform01()); }

private:
    std::uint64_t state_;
};

// Substream path labels. Keeping them in one place avoids accidental reuse
// of the same (seed, label) pair by two different consumers.
enum : std::uint64_t {
    kLabelReplica = 1,
    kLabelPerturbation = 2,
    kLabelMetaPerturbation = 3,
    kLabelEnvironment = 4,
    kLabelRound = 5,
    kLabelProbeSample = 6,
};

} // namespace fpl::rng
