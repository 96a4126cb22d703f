#ifndef JETFORGE_PRNG_HPP
#define JETFORGE_PRNG_HPP

#include <cstdint>
#include <string>

#include "jetforge/rational.hpp"

namespace jetforge {

// Deterministic 64-bit generator (splitmix64). Reports name the stream so a
// reader can reproduce every sampled point from (seed, version) alone.
class Prng {
  public:
    static constexpr const char* version = "splitmix64-v1";

    explicit Prng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [lo, hi].
    long uniform_int(long lo, long hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(next() % span);
    }

    // Small rational with numerator in [-num_range, num_range] and
    // denominator in [1, den_range]. Keeps sample points well-conditioned.
    Rational small_rational(long num_range = 10, long den_range = 4) {
        long num = uniform_int(-num_range, num_range);
        long den = uniform_int(1, den_range);
        return rat(num, den);
    }

    // Nonzero variant, for flag vectors and denominators.
    Rational small_nonzero_rational(long num_range = 10, long den_range = 4) {
        for (;;) {
            Rational r = small_rational(num_range, den_range);
            if (r != 0) return r;
        }
    }

  private:
    std::uint64_t state_;
};

} // namespace jetforge

#endif
