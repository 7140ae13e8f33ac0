#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rtevo {

// Deterministic, platform-independent PRNG (xoshiro256** seeded via
// splitmix64). std:: distributions are implementation-defined, so all
// sampling helpers live here; byte-identical output across platforms is a
// hard requirement for corpus generation and the evolutionary engines.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_)
            word = splitmix(x);
    }

    // Independent stream derived from (seed, a, b, c); used so parallel
    // workers draw exactly the numbers serial execution would.
    static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t x = seed;
        std::uint64_t mixed = splitmix(x);
        x ^= 0x9e3779b97f4a7c15ULL + a;
        mixed ^= splitmix(x);
        x ^= 0xbf58476d1ce4e5b9ULL + b;
        mixed ^= splitmix(x);
        x ^= 0x94d049bb133111ebULL + c;
        mixed ^= splitmix(x);
        return Rng(mixed);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased uniform in [0, n); n >= 1.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit)
            v = next_u64();
        return v % n;
    }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform double in [0, 1).
    double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

private:
    static std::uint64_t splitmix(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

} // namespace rtevo
