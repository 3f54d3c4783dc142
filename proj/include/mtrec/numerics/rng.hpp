#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mtrec {

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
// the standard); all distribution transforms are implemented here so draw
// sequences are identical across platforms and standard libraries.
//
// Child streams are derived from the creating seed and a label, never from
// the stream position, so they are independent of how much the parent has
// been consumed.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed);

    uint64_t seed() const { return seed_; }
    uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    // Uniform integer on [0, n). n must be positive.
    int uniform_int(int n);
    // Standard normal via Box-Muller (two uniforms per draw, no caching).
    double normal();
    double normal(double mean, double stddev);

    SeededRng child(std::string_view label, uint64_t index = 0) const;

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace mtrec
