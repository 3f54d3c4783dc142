#pragma once

#include <span>
#include <vector>

#include "mtrec/mdp/types.hpp"
#include "mtrec/numerics/net.hpp"

namespace mtrec::irl {

enum class Mode { scalar, quantile };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct IRLConfig {
    double gamma = 0.9;
    double alpha = 0.5;
    int n_quantiles = 10;
    double learning_rate = 1e-3;
    int batch_size = 4000;
    long long iterations = 50000;
    // The derivation of the squared error carries gamma inside the bootstrap
    // term; false reproduces the printed form without it.
    bool include_gamma_in_u2 = true;
    std::vector<int> hidden = {64, 64};

    void validate() const;
};

// Midpoint quantile levels tau_i = (2i-1)/(2N).
std::vector<double> quantile_levels(int n);

// Value network whose output layer holds |A|*N quantile heads lambda_i(s,a),
// action-major: head index = action * N + i. Q_lambda(s,a) is the exact
// arithmetic mean of the action's heads.
class QuantileQNetwork {
public:
    QuantileQNetwork() = default;
    QuantileQNetwork(int feature_dim, int n_quantiles,
                     const std::vector<int>& hidden, SeededRng& rng);
    static QuantileQNetwork wrap(FeedForwardNet net, int n_quantiles);

    int n_quantiles() const { return n_; }
    const std::vector<double>& levels() const { return tau_; }
    const FeedForwardNet& net() const { return net_; }
    FeedForwardNet& net() { return net_; }

    std::vector<double> heads(std::span<const double> state) const;
    double head(std::span<const double> heads, mdp::Action a, int quantile) const;
    double q_value(std::span<const double> heads, mdp::Action a) const;
    // V_i(s) = logsumexp over actions of lambda_i(s,.), one entry per quantile.
    std::vector<double> v_soft_per_quantile(std::span<const double> heads) const;

private:
    FeedForwardNet net_;
    int n_ = 0;
    std::vector<double> tau_;
};

}  // namespace mtrec::irl
