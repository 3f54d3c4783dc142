#include "mtrec/numerics/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtrec/common.hpp"

namespace mtrec {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(uint64_t seed) : seed_(seed), engine_(seed) {}

uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

int SeededRng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const uint64_t bound = static_cast<uint64_t>(n);
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % bound);
}

double SeededRng::normal() {
    // 1 - u1 keeps the log argument in (0, 1].
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededRng::normal(double mean, double stddev) {
    return mean + stddev * normal();
}

SeededRng SeededRng::child(std::string_view label, uint64_t index) const {
    uint64_t h = fnv1a64(&seed_, sizeof(seed_));
    h = fnv1a64(label.data(), label.size(), h);
    h = fnv1a64(&index, sizeof(index), h);
    return SeededRng(splitmix64(h));
}

}  // namespace mtrec
