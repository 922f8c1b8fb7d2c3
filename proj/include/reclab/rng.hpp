// rng.hpp: counter-based random streams keyed by (seed, stream id).
#pragma once

#include <cstdint>
#include <numbers>

namespace reclab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Output i of stream (seed, id) is a pure function of (seed, id, i), so a
// trial or chunk draws the same numbers whatever thread runs it.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull))) {}

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next_u64() noexcept {
        return splitmix64(key_ + 0x9E3779B97F4A7C15ull * counter_++);
    }

    // [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double phase() noexcept { return 2.0 * std::numbers::pi * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace reclab
