#include "mtrec/irl/reward.hpp"

#include <algorithm>

namespace mtrec::irl {

using mdp::Action;

MentalRewardEstimate recover_reward(const QuantileQNetwork& qnet,
                                    std::span<const double> s_feat,
                                    Action action,
                                    std::span<const double> sp_feat,
                                    bool terminal, double gamma) {
    const int n = qnet.n_quantiles();
    const std::vector<double> y = qnet.heads(s_feat);
    std::vector<double> v;
    if (!terminal) v = qnet.v_soft_per_quantile(qnet.heads(sp_feat));

    MentalRewardEstimate est;
    est.quantile_rewards.resize(n);
    const std::size_t base = static_cast<std::size_t>(mdp::action_label(action)) * n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = terminal ? y[base + i] : y[base + i] - gamma * v[i];
        est.quantile_rewards[i] = r;
        sum += r;
    }
    est.expectation = sum / n;
    const auto [lo, hi] = std::minmax_element(est.quantile_rewards.begin(),
                                              est.quantile_rewards.end());
    est.spread = *hi - *lo;
    return est;
}

mdp::Dataset annotate_dataset(const mdp::Dataset& data,
                              const QuantileQNetwork& qnet,
                              const mdp::FeaturizerConfig& fcfg, double gamma,
                              Exec mode) {
    mdp::Dataset out = data;
    out.rebuild_index();
    const int dim = mdp::feature_width(data.meta.embedding_dim, fcfg);
    for_items(out.trajectories.size(), mode, [&](std::size_t ti) {
        auto& traj = out.trajectories[ti];
        std::vector<double> s_feat(dim), sp_feat(dim);
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            auto& step = traj.steps[t];
            std::span<const mdp::InteractionStep> hist(traj.steps.data(), t);
            mdp::encode_state(hist, out.item(step.item_id), out, fcfg, s_feat);
            const bool terminal = t + 1 == traj.steps.size();
            if (!terminal) {
                std::span<const mdp::InteractionStep> hist2(traj.steps.data(), t + 1);
                mdp::encode_state(hist2, out.item(traj.steps[t + 1].item_id), out,
                                  fcfg, sp_feat);
            }
            step.annotated_reward_pos =
                recover_reward(qnet, s_feat, Action::Positive, sp_feat, terminal,
                               gamma)
                    .expectation;
            step.annotated_reward_neg =
                recover_reward(qnet, s_feat, Action::Negative, sp_feat, terminal,
                               gamma)
                    .expectation;
        }
    });
    return out;
}

}  // namespace mtrec::irl
