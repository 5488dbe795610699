#pragma once

#include <cstdint>
#include <random>

namespace steercert {

/// Deterministic RNG wrapper.  Gaussian samples use an explicit Box-Muller
/// transform so results do not depend on the standard library's
/// normal_distribution implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent stream for restart index k, derived from the base seed.
    static Rng derived(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t h = seed;
        h ^= 0x9e3779b97f4a7c15ULL + (stream << 6) + (stream >> 2) + stream;
        h *= 0xbf58476d1ce4e5b9ULL;
        h ^= h >> 27;
        return Rng(h);
    }

    double uniform() {
        // 53-bit mantissa uniform in (0,1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t integer() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace steercert
