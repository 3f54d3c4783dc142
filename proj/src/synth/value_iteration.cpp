#include "mtrec/synth/value_iteration.hpp"

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/numerics/reductions.hpp"

namespace mtrec::synth {

using mdp::Action;

ExpertTables soft_value_iteration(const SynthEnv& env, double gamma, double tol,
                                  int max_sweeps, Exec mode) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("soft_value_iteration: gamma must be in [0,1)");
    if (!(tol > 0.0))
        throw std::invalid_argument("soft_value_iteration: tol must be positive");

    const int n = env.n_latent();
    const int k = env.cfg.fatigue_levels;
    const int t = env.cfg.topics;
    const int ncodes = env.n_interest_codes();
    const double temp = env.cfg.expert_temperature;

    ExpertTables tab;
    tab.gamma = gamma;
    tab.temperature = temp;
    tab.q.assign(static_cast<std::size_t>(n) * 2, 0.0);
    tab.v.assign(n, 0.0);
    tab.r_dec.assign(static_cast<std::size_t>(n) * 2, 0.0);
    tab.r_true_mean.assign(static_cast<std::size_t>(n) * 2, 0.0);
    tab.r_true_std.assign(static_cast<std::size_t>(n) * 2, 0.0);

    // Rewards and continuation outcomes are state-stationary; compute once.
    struct FlatOutcome {
        int wi;  // index into the item-marginalized value table W
        double prob;
    };
    std::vector<std::vector<FlatOutcome>> outs(static_cast<std::size_t>(n) * 2);
    for_items(static_cast<std::size_t>(n), mode, [&](std::size_t si) {
        const auto s = env.decode(static_cast<int>(si));
        std::vector<SynthEnv::Outcome> tmp;
        for (int a = 0; a < 2; ++a) {
            const Action act = a == 1 ? Action::Positive : Action::Negative;
            const std::size_t sa = si * 2 + static_cast<std::size_t>(a);
            tab.r_dec[sa] = env.decision_reward(s, act);
            tab.r_true_mean[sa] = env.reward_mean(s, act);
            tab.r_true_std[sa] = env.reward_std(s, act);
            env.continue_outcomes(s, act, tmp);
            auto& dst = outs[sa];
            dst.reserve(tmp.size());
            for (const auto& o : tmp)
                dst.push_back({o.interest_code * k + o.fatigue, o.prob});
        }
    });

    std::vector<double> w(static_cast<std::size_t>(ncodes) * k, 0.0);
    std::vector<double> v_new(n, 0.0);
    const auto& pitem = env.item_marginal();
    const std::size_t n_blocks = block_count(static_cast<std::size_t>(n), 256);
    std::vector<double> block_max(n_blocks, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // W(interest, fatigue) = E over the uniform next-item draw of V.
        for_items(static_cast<std::size_t>(ncodes) * k, mode, [&](std::size_t cf) {
            double acc = 0.0;
            for (int ci = 0; ci < t; ++ci)
                for (int b = 0; b < 2; ++b)
                    acc += pitem[ci * 2 + b] * tab.v[(cf * t + ci) * 2 + b];
            w[cf] = acc;
        });
        for_blocks(static_cast<std::size_t>(n), 256, mode,
                   [&](std::size_t lo, std::size_t hi, std::size_t blk) {
                       double worst = 0.0;
                       for (std::size_t si = lo; si < hi; ++si) {
                           double qs[2];
                           for (int a = 0; a < 2; ++a) {
                               const std::size_t sa = si * 2 + static_cast<std::size_t>(a);
                               double ev = 0.0;
                               for (const auto& o : outs[sa]) ev += o.prob * w[o.wi];
                               qs[a] = tab.r_dec[sa] + gamma * ev;
                               tab.q[sa] = qs[a];
                           }
                           const double scaled[2] = {qs[0] / temp, qs[1] / temp};
                           v_new[si] = temp * logsumexp(std::span<const double>(scaled, 2));
                           const double d = std::abs(v_new[si] - tab.v[si]);
                           if (d > worst) worst = d;
                       }
                       block_max[blk] = worst;
                   });
        double residual = 0.0;
        for (double d : block_max)
            if (d > residual) residual = d;
        tab.v.swap(v_new);
        tab.residuals.push_back(residual);
        if (residual < tol) return tab;
    }
    throw numeric_error("soft_value_iteration: no convergence after " +
                            std::to_string(max_sweeps) +
                            " sweeps, residual " + format_double(tab.residuals.back()),
                        max_sweeps);
}

std::vector<double> expert_policy(const ExpertTables& tables, double temperature) {
    if (!(temperature > 0.0))
        throw std::invalid_argument("expert_policy: temperature must be positive");
    const std::size_t n = tables.v.size();
    std::vector<double> probs(n * 2, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        double pair[2] = {tables.q[s * 2] / temperature,
                          tables.q[s * 2 + 1] / temperature};
        softmax_inplace(pair);
        probs[s * 2] = pair[0];
        probs[s * 2 + 1] = pair[1];
    }
    return probs;
}

}  // namespace mtrec::synth
