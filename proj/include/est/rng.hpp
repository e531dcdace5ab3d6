#pragma once

#include <cstdint>
#include <random>

namespace est {

/// SplitMix64 finalizer; used only to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Named sub-streams of one episode. Each consumer draws from its own stream so
/// that, e.g., an agent's randomness never perturbs the episode generator.
enum class Stream : std::uint64_t { episode = 1, trial = 2, agent = 3 };

/// Deterministic generator keyed by (master_seed, episode_index, stream).
///
/// Only the mt19937_64 raw output is used; the conversions to doubles and
/// bounded integers are done here rather than through <random> distributions,
/// whose algorithms differ between standard library implementations.
class SeededRng {
public:
    SeededRng(std::uint64_t master_seed, std::uint64_t episode_index, Stream stream = Stream::episode)
        : engine_(mix64(mix64(master_seed) ^ mix64(episode_index + 0x632be59bd9b4e019ULL) ^
                        mix64(static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL))) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection on the top of the range).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return x % n;
    }

    /// Uniform integer in [lo, hi].
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace est
