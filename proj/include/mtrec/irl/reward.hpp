#pragma once

#include "mtrec/irl/qnet.hpp"
#include "mtrec/mdp/features.hpp"
#include "mtrec/numerics/parallel.hpp"

namespace mtrec::irl {

// Recovered reward distribution at one (state, action): N quantile samples
// r_i = lambda_i(s,a) - gamma * V_i(s'), their mean, and their range.
struct MentalRewardEstimate {
    std::vector<double> quantile_rewards;
    double expectation = 0.0;
    double spread = 0.0;
};

// Terminal transitions never reference the successor: r_i = lambda_i(s,a).
MentalRewardEstimate recover_reward(const QuantileQNetwork& qnet,
                                    std::span<const double> s_feat,
                                    mdp::Action action,
                                    std::span<const double> sp_feat,
                                    bool terminal, double gamma);

// Fills r*(s, a^P) and r*(s, a^N) on every step, bootstrapping both actions
// from the step's observed successor state. Idempotent; other fields
// untouched.
mdp::Dataset annotate_dataset(const mdp::Dataset& data,
                              const QuantileQNetwork& qnet,
                              const mdp::FeaturizerConfig& fcfg, double gamma,
                              Exec mode = Exec::parallel);

}  // namespace mtrec::irl
