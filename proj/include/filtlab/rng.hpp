#pragma once

#include <cmath>
#include <cstdint>

namespace filtlab {

// Small hand-rolled generator (splitmix64 core).  We deliberately avoid the
// std:: distributions: their output is implementation-defined, and the suite
// runner promises byte-identical reports for a given seed no matter how many
// worker threads execute the trials.  Every trial derives its own stream from
// (master seed, trial index), so the schedule cannot leak into the numbers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// inclusive integer range
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // Box-Muller; u1 bounded away from zero.
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double lognormal(double sigma) { return std::exp(sigma * normal()); }

  private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// Stream for one trial of a randomized suite, independent of scheduling.
inline Rng trial_rng(std::uint64_t master, std::uint64_t trial) {
    Rng mix(master ^ (0x100000001b3ULL * (trial + 1)));
    mix.next_u64();
    return Rng(mix.next_u64());
}

} // namespace filtlab
