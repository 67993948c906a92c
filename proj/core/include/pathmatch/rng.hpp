#ifndef PATHMATCH_RNG_HPP
#define PATHMATCH_RNG_HPP

#include <cstdint>
#include <string_view>

namespace pathmatch {

// Deterministic splitmix64 generator. The standard <random> distributions are
// implementation-defined, so everything that must reproduce bit-for-bit across
// toolchains draws from this instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        // rejection sampling on the top of the range
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit && limit != 0);
        return x % bound;
    }

    std::uint32_t next_u32_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>(next_below(bound));
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool next_bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return next_double() < p;
    }

private:
    std::uint64_t state_;
};

// Stable sub-stream derivation: one manifest seed fans out into independent
// generator streams keyed by a short tag ("graph", "queries", "partition", ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace pathmatch

#endif
