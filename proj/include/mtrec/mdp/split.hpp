#pragma once

#include <cstdint>

#include "mtrec/mdp/types.hpp"

namespace mtrec::mdp {

struct DatasetSplits {
    Dataset train;
    Dataset test;
    Dataset ncis;
};

// User-disjoint partition: complete trajectories of each user land in exactly
// one split. Fractions must lie in (0,1) and sum below 1; the remainder is
// the test split. Deterministic given the seed.
DatasetSplits split_dataset(const Dataset& data, double train_frac,
                            double ncis_frac, uint64_t seed);

}  // namespace mtrec::mdp
