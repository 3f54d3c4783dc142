#pragma once

#include <cstdint>
#include <span>

#include "mtrec/irl/qnet.hpp"
#include "mtrec/mdp/features.hpp"
#include "mtrec/numerics/parallel.hpp"

namespace mtrec::irl {

// Featurized (s, a, s') transitions formed from consecutive steps of each
// trajectory; the last step of a trajectory is terminal and its successor
// row is zero-filled and never read.
struct TransitionBatch {
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> s;   // n x dim
    std::vector<double> sp;  // n x dim
    std::vector<int> action;
    std::vector<uint8_t> terminal;
};

TransitionBatch build_transitions(const mdp::Dataset& data,
                                  const mdp::FeaturizerConfig& fcfg);

// Pinball-weighted QR-IQL objective over the selected transitions: per
// quantile i, u1 = lambda_i(s,a) - logsumexp_a lambda_i(s,.) and
// u2 = (1/4a)(lambda_i(s,a) - g~ * logsumexp_a lambda_i(s',.))^2 with
// g~ = gamma when include_gamma_in_u2, else 1; the loss is the mean over
// samples of sum_i p_tau_i(u1) + p_tau_i(u2). u1 <= 0 and u2 >= 0 are
// asserted for every sample. Mean gradients accumulate into *grad when
// non-null (must be zeroed, param_count entries).
double qr_iq_loss(const QuantileQNetwork& qnet, const TransitionBatch& batch,
                  std::span<const std::size_t> indices, const IRLConfig& cfg,
                  Exec mode, std::vector<double>* grad);

// Scalar offline inverse-Q objective (requires N = 1): mean over samples of
// -[Q(s,a) - V(s)] + (1/4a)(Q(s,a) - gamma V(s'))^2.
double iq_loss_scalar(const QuantileQNetwork& qnet, const TransitionBatch& batch,
                      std::span<const std::size_t> indices, const IRLConfig& cfg,
                      Exec mode, std::vector<double>* grad);

}  // namespace mtrec::irl
