#pragma once

#include <utility>

#include "mtrec/irl/loss.hpp"

namespace mtrec::irl {

struct TrainIrlResult {
    QuantileQNetwork qnet;
    // (iteration, batch loss) at every multiple of 100 iterations.
    std::vector<std::pair<long long, double>> loss_curve;
};

// Algorithm loop: sample a batch of (s, a, s') with replacement, minimize the
// mode's objective with Adam. Deterministic given the seed; scalar mode
// forces a single quantile head.
TrainIrlResult train_irl(const mdp::Dataset& data, IRLConfig cfg, Mode mode,
                         const mdp::FeaturizerConfig& fcfg, uint64_t seed,
                         Exec exec = Exec::parallel);

}  // namespace mtrec::irl
