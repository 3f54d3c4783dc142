#pragma once

#include <vector>

#include "mtrec/numerics/parallel.hpp"
#include "mtrec/synth/env.hpp"

namespace mtrec::synth {

// Exact soft value tables over the enumerated latent space. `q` and `v` are
// the behavioral tables (value-iterated on the decision reward, i.e. ground
// truth plus the clickbait appeal wedge); the r_* tables expose the ground
// truth for evaluation. Tables indexed latent_id * 2 + action (0 = Negative,
// 1 = Positive).
struct ExpertTables {
    std::vector<double> q;
    std::vector<double> v;
    std::vector<double> r_dec;
    std::vector<double> r_true_mean;
    std::vector<double> r_true_std;
    std::vector<double> residuals;  // sup-norm change per sweep
    double gamma = 0.0;
    double temperature = 1.0;
};

// Jacobi sweeps of the soft backup
//   Q(s,a) = r_dec(s,a) + gamma * E_{s'|s,a}[V(s')]
//   V(s)   = temperature * logsumexp_a(Q(s,a) / temperature)
// until the sup-norm change drops below tol. The successor expectation
// marginalizes the reward-sign-dependent interest drift, the fatigue coin,
// session exit, and the uniform next-item draw. Throws numeric_error with
// the residual if max_sweeps is exhausted.
ExpertTables soft_value_iteration(const SynthEnv& env, double gamma, double tol,
                                  int max_sweeps = 100000,
                                  Exec mode = Exec::parallel);

// pi(a|s) = softmax(Q(s,.) / temperature); indexed latent_id * 2 + action.
std::vector<double> expert_policy(const ExpertTables& tables, double temperature);

}  // namespace mtrec::synth
