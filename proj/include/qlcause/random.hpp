#pragma once
// Deterministic random draws. Uniforms are derived from raw mt19937_64
// output by a fixed bit recipe instead of std::uniform_real_distribution,
// so identical seeds give identical streams on every platform.

#include <cmath>
#include <cstdint>
#include <random>

namespace qlcause {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Exp(1) via inversion; 0 is possible, infinity is not.
    double exponential() { return -std::log1p(-uniform()); }

    // standard normal (Box-Muller, one value per call pair kept simple)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    // Stream for an independent worker/trial: seed ^ mixed index.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 finalizer on the index, xored into the seed
        std::uint64_t z = index + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return seed ^ z;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace qlcause
