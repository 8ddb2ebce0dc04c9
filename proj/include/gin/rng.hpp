#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gin {

/// Derives the seed of the stream addressed by `path` below `master`.
/// Uses std::seed_seq, whose output is fixed by the standard, so streams are
/// identical across platforms and independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Stream tags used by the generators.
namespace stream {
inline constexpr std::uint64_t kCoefficients = 1;
inline constexpr std::uint64_t kWiring = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kRepetition = 4;
inline constexpr std::uint64_t kPermutation = 5;
}  // namespace stream

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t master, std::initializer_list<std::uint64_t> path)
        : engine_(derive_seed(master, path)) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    bool coin() { return (engine_() >> 63) != 0; }
    std::uint64_t next_u64() { return engine_(); }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace gin
