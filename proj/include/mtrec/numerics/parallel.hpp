#pragma once

#include <cstddef>
#include <functional>

namespace mtrec {

// Execution policy for the data-parallel kernels. Both policies perform the
// same arithmetic in the same order: work is cut into fixed-size blocks,
// each block is reduced sequentially, and block results are combined in
// block-index order. Serial runs the blocks on the calling thread and is
// the reference the OpenMP path is tested against bit-for-bit.
enum class Exec { serial, parallel };

int hardware_threads();

// Invokes fn(begin, end, block_index) for each block of at most block_size
// elements. Blocks are independent; per-block outputs must be written to
// distinct storage indexed by block_index.
void for_blocks(std::size_t n, std::size_t block_size, Exec mode,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Same contract, iterating over n items one at a time (block_size 1).
void for_items(std::size_t n, Exec mode,
               const std::function<void(std::size_t)>& fn);

inline std::size_t block_count(std::size_t n, std::size_t block_size) {
    return n == 0 ? 0 : (n + block_size - 1) / block_size;
}

}  // namespace mtrec
