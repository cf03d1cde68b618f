#pragma once

#include <cmath>
#include <cstdint>

#include "riszone/math.hpp"

namespace riszone {

/// Counter-based deterministic RNG. Streams are derived injectively from
/// (seed, stream) so trial k of a Monte-Carlo run always sees the same draws
/// regardless of evaluation order or thread count, and results are
/// byte-identical across platforms (no implementation-defined std::
/// distributions involved).
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 over (seed, stream): two absorption rounds keep the
        // mapping injective in each argument.
        state_ = mix(seed + 0x9e3779b97f4a7c15ULL);
        state_ = mix(state_ ^ mix(stream + 0xbf58476d1ce4e5b9ULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; safe as a log() argument.
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double_open();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace riszone
