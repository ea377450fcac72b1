#pragma once

#include <cstdint>
#include <random>

namespace hbs {

// SplitMix64 step. Used to derive independent substream seeds from a master
// seed so that per-instance streams do not depend on draw counts elsewhere.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded generator with portable bounded draws. mt19937_64 output is pinned
// by the standard; std::uniform_int_distribution is not, so bounded draws are
// done here by rejection to keep runs reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Uniform over [0, bound), bound >= 1, without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = gen_();
            if (x >= threshold) return x % bound;
        }
    }

    // Uniform in [0, 1), 53-bit resolution.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t word() { return gen_(); }

    // Independent child stream; depends only on (seed, stream), not on how
    // many draws this generator has produced.
    Rng child(std::uint64_t stream) const {
        std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        splitmix64(s);
        return Rng(splitmix64(s));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace hbs
