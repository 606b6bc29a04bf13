// rng.hpp — seeded, splittable random streams with portable distributions.
//
// All distribution code is implemented here (rather than <random>'s
// distribution templates) so that a given (seed, counter) pair produces the
// same draw sequence on every platform. Streams are split from a master seed
// by counter, which keeps dataset generation order-independent.
#ifndef NETGROW_RNG_HPP_
#define NETGROW_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace netgrow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Mixes a master seed with up to two stream indices into a fresh 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0xD1342543DE82EF95ull;
    h ^= splitmix64(s);
    s ^= b * 0xAF251AF3B0F025B5ull;
    h ^= splitmix64(s);
    return h;
}

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream split(std::uint64_t master, std::uint64_t counter) {
        return RngStream(derive_seed(master, counter));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t uniform_int(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % bound;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double alpha, double beta) {
        double x = gamma(alpha);
        double y = gamma(beta);
        return x / (x + y);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace netgrow

#endif  // NETGROW_RNG_HPP_
