#include "mtrec/numerics/parallel.hpp"

#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mtrec {

int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void for_blocks(std::size_t n, std::size_t block_size, Exec mode,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nblocks = block_count(n, block_size);
    if (mode == Exec::serial) {
        for (std::size_t b = 0; b < nblocks; ++b) {
            const std::size_t lo = b * block_size;
            const std::size_t hi = lo + block_size < n ? lo + block_size : n;
            fn(lo, hi, b);
        }
        return;
    }
    // Exceptions must not unwind through the OpenMP region; capture per
    // block and rethrow the lowest block's error for determinism.
    std::vector<std::exception_ptr> errors(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * block_size;
        const std::size_t hi = lo + block_size < n ? lo + block_size : n;
        try {
            fn(lo, hi, static_cast<std::size_t>(b));
        } catch (...) {
            errors[static_cast<std::size_t>(b)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void for_items(std::size_t n, Exec mode,
               const std::function<void(std::size_t)>& fn) {
    for_blocks(n, 1, mode,
               [&fn](std::size_t lo, std::size_t, std::size_t) { fn(lo); });
}

}  // namespace mtrec
