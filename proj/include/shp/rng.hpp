#pragma once

#include <cmath>
#include <cstdint>

namespace shp {

// splitmix64 finalizer; bijective mixing of a 64-bit counter
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: the n-th output is a pure function of
// (seed, stream, n), so path-level streams are reproducible regardless of
// evaluation order across paths.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream)
        : key_(mix64(seed ^ mix64(stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL))) {}

    uint64_t next_u64() { return mix64(key_ ^ mix64(ctr_++)); }

    // strictly inside (0,1)
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

private:
    uint64_t key_;
    uint64_t ctr_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace shp
