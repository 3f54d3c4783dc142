#include "mtrec/irl/qnet.hpp"

#include <stdexcept>

#include "mtrec/common.hpp"
#include "mtrec/numerics/reductions.hpp"

namespace mtrec::irl {

std::string mode_name(Mode m) { return m == Mode::scalar ? "scalar" : "quantile"; }

Mode mode_from_name(const std::string& name) {
    if (name == "scalar") return Mode::scalar;
    if (name == "quantile") return Mode::quantile;
    throw config_error("unknown IRL mode '" + name + "' (scalar|quantile)");
}

void IRLConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("irl: gamma must be in [0,1)");
    if (!(alpha > 0.0)) throw std::invalid_argument("irl: alpha must be positive");
    if (n_quantiles < 1) throw std::invalid_argument("irl: n_quantiles must be >= 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("irl: learning_rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("irl: batch_size must be >= 1");
    if (iterations < 0) throw std::invalid_argument("irl: iterations must be >= 0");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("irl: hidden widths must be >= 1");
}

std::vector<double> quantile_levels(int n) {
    if (n < 1) throw std::invalid_argument("quantile_levels: n must be >= 1");
    std::vector<double> tau(n);
    for (int i = 0; i < n; ++i) tau[i] = (2.0 * (i + 1) - 1.0) / (2.0 * n);
    return tau;
}

QuantileQNetwork::QuantileQNetwork(int feature_dim, int n_quantiles,
                                   const std::vector<int>& hidden, SeededRng& rng)
    : net_(feature_dim, hidden, 2 * n_quantiles, Activation::relu,
           Activation::identity, rng),
      n_(n_quantiles),
      tau_(quantile_levels(n_quantiles)) {}

QuantileQNetwork QuantileQNetwork::wrap(FeedForwardNet net, int n_quantiles) {
    if (net.output_width() != 2 * n_quantiles)
        throw std::invalid_argument("QuantileQNetwork: output width must be 2N");
    QuantileQNetwork q;
    q.net_ = std::move(net);
    q.n_ = n_quantiles;
    q.tau_ = quantile_levels(n_quantiles);
    return q;
}

std::vector<double> QuantileQNetwork::heads(std::span<const double> state) const {
    return net_.forward(state);
}

double QuantileQNetwork::head(std::span<const double> heads, mdp::Action a,
                              int quantile) const {
    return heads[static_cast<std::size_t>(mdp::action_label(a)) * n_ + quantile];
}

double QuantileQNetwork::q_value(std::span<const double> heads, mdp::Action a) const {
    const std::size_t base = static_cast<std::size_t>(mdp::action_label(a)) * n_;
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += heads[base + i];
    return s / n_;
}

std::vector<double> QuantileQNetwork::v_soft_per_quantile(
    std::span<const double> heads) const {
    std::vector<double> v(n_);
    for (int i = 0; i < n_; ++i) {
        const double pair[2] = {heads[i], heads[static_cast<std::size_t>(n_) + i]};
        v[i] = logsumexp(std::span<const double>(pair, 2));
    }
    return v;
}

}  // namespace mtrec::irl
