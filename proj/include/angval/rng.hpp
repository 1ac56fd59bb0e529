#pragma once

#include <cmath>
#include <cstdint>

namespace angval {

// Counter-based 64-bit generator built on the splitmix64 finalizer.
// Streams are derived from (seed, purpose, rep) so that replications and
// independent subsystems never share a sequence; identical keys always
// reproduce identical draws, bit for bit.
namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t purpose,
                            std::uint64_t rep = 0) {
    std::uint64_t k = mix(seed ^ 0x8f2d3a5b1c6e9d47ULL);
    k = mix(k ^ mix(purpose));
    k = mix(k ^ mix(rep ^ 0x517cc1b727220a95ULL));
    return k;
}

class Stream {
public:
    explicit Stream(std::uint64_t key) : key_(key), counter_(0) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // uniform in [0,1)
    double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_u01(); }

    // Box-Muller; deterministic across platforms (no libstdc++ distribution use).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_u01();
        double u2 = next_u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rng
}  // namespace angval
