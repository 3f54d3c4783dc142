#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtrec {

// Raised when a computation produces non-finite values or a solver fails to
// converge. `index` carries the offending batch index / iteration when known.
struct numeric_error : std::runtime_error {
    long long index;
    explicit numeric_error(const std::string& what, long long idx = -1)
        : std::runtime_error(what), index(idx) {}
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

uint64_t fnv1a64(const void* data, std::size_t n,
                 uint64_t h = 14695981039346656037ULL);
uint64_t fnv1a64(std::string_view s);
std::string to_hex(uint64_t v);

}  // namespace mtrec
