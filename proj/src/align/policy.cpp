#include "mtrec/align/policy.hpp"

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/numerics/adam.hpp"
#include "mtrec/numerics/reductions.hpp"

namespace mtrec::align {

using mdp::Action;

namespace {

mdp::Dataset make_skeleton(const synth::SynthEnv& env) {
    mdp::Dataset d;
    d.meta.embedding_dim = env.cfg.topics + 1;
    d.meta.env_config_hash = env.config_hash;
    d.catalog = env.catalog;
    d.rebuild_index();
    return d;
}

int sample_from_probs(std::span<const double> probs, SeededRng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

PolicyEpisode rollout_policy_episode(const synth::SynthEnv& env,
                                     const std::vector<double>& user_probs,
                                     const FeedForwardNet& policy,
                                     const mdp::Dataset& skeleton,
                                     const mdp::FeaturizerConfig& fcfg,
                                     int episode_len, SeededRng& rng,
                                     std::vector<mdp::InteractionStep>* steps_out) {
    PolicyEpisode ep;
    const int hw = mdp::history_width(skeleton.meta.embedding_dim, fcfg);
    synth::ItemChooser choose = [&](std::span<const mdp::InteractionStep> hist,
                                    SeededRng& r) {
        std::vector<double> feat(hw);
        mdp::encode_history(hist, skeleton, fcfg, feat);
        std::vector<double> logits = policy.forward(feat);
        softmax_inplace(logits);
        const int idx = sample_from_probs(logits, r);
        ep.hist_feats.push_back(std::move(feat));
        ep.item_idx.push_back(idx);
        return idx;
    };
    synth::EpisodeRecord rec =
        synth::run_episode(env, user_probs, choose, episode_len, rng);
    ep.true_reward_sum = rec.true_reward_sum;
    ep.clicks = rec.clicks;
    ep.steps = static_cast<int>(rec.steps.size());
    ep.final_return = static_cast<double>(rec.clicks);
    if (steps_out) *steps_out = std::move(rec.steps);
    return ep;
}

PolicyTrainResult train_policy(const synth::SynthEnv& env,
                               const synth::ExpertTables& tables,
                               const irl::QuantileQNetwork* qnet, double kappa,
                               double irl_gamma, const AlignConfig& cfg,
                               const mdp::FeaturizerConfig& fcfg, uint64_t seed,
                               Exec mode) {
    cfg.validate();
    if (kappa < 0.0) throw std::invalid_argument("train_policy: kappa must be >= 0");
    if (kappa > 0.0 && qnet == nullptr)
        throw std::invalid_argument(
            "train_policy: kappa > 0 requires a mental reward checkpoint");

    const mdp::Dataset skeleton = make_skeleton(env);
    const std::vector<double> user_probs =
        synth::expert_policy(tables, tables.temperature);
    const int hw = mdp::history_width(skeleton.meta.embedding_dim, fcfg);
    const int n_items = static_cast<int>(env.catalog.size());
    const int dim = mdp::feature_width(skeleton.meta.embedding_dim, fcfg);

    SeededRng init_rng = SeededRng(seed).child("policy_init");
    PolicyTrainResult result;
    result.net =
        FeedForwardNet(hw, cfg.hidden, n_items, Activation::relu,
                       Activation::identity, init_rng);
    Adam opt(result.net.param_count(), {cfg.policy_learning_rate});

    const std::size_t n_ep = static_cast<std::size_t>(cfg.policy_episodes);
    const SeededRng master(seed);
    std::vector<PolicyEpisode> episodes(n_ep);

    for (int it = 0; it < cfg.policy_iterations; ++it) {
        for_items(n_ep, mode, [&](std::size_t e) {
            SeededRng rng = master.child(
                "policy_ep", static_cast<uint64_t>(it) * n_ep + e);
            std::vector<mdp::InteractionStep> steps;
            PolicyEpisode ep =
                rollout_policy_episode(env, user_probs, result.net, skeleton, fcfg,
                                       env.cfg.episode_len, rng, &steps);
            if (kappa > 0.0) {
                std::vector<double> s_feat(dim), sp_feat(dim);
                for (std::size_t t = 0; t < steps.size(); ++t) {
                    std::span<const mdp::InteractionStep> hist(steps.data(), t);
                    mdp::encode_state(hist, skeleton.item(steps[t].item_id), skeleton,
                                      fcfg, s_feat);
                    const bool terminal = t + 1 == steps.size();
                    if (!terminal) {
                        std::span<const mdp::InteractionStep> hist2(steps.data(),
                                                                    t + 1);
                        mdp::encode_state(hist2,
                                          skeleton.item(steps[t + 1].item_id),
                                          skeleton, fcfg, sp_feat);
                    }
                    const auto est =
                        irl::recover_reward(*qnet, s_feat, steps[t].action, sp_feat,
                                            terminal, irl_gamma);
                    ep.final_return += kappa * est.expectation;
                }
            }
            episodes[e] = std::move(ep);
        });

        double baseline = 0.0;
        for (const auto& ep : episodes) baseline += ep.final_return;
        baseline /= static_cast<double>(n_ep);
        result.mean_return.push_back(baseline);

        // Score-function gradient of -(R - b) * sum_t log pi(i_t | h_t).
        const std::size_t p = result.net.param_count();
        std::vector<std::vector<double>> block_grad(n_ep);
        for_items(n_ep, mode, [&](std::size_t e) {
            auto& g = block_grad[e];
            g.assign(p, 0.0);
            const auto& ep = episodes[e];
            const double coeff =
                -(ep.final_return - baseline) / static_cast<double>(n_ep);
            FeedForwardNet::Trace trace;
            std::vector<double> dlogits(n_items);
            for (std::size_t t = 0; t < ep.hist_feats.size(); ++t) {
                result.net.forward_trace(ep.hist_feats[t], trace);
                std::vector<double> probs = result.net.output(trace);
                softmax_inplace(probs);
                for (int i = 0; i < n_items; ++i)
                    dlogits[i] = coeff * ((i == ep.item_idx[t] ? 1.0 : 0.0) - probs[i]);
                result.net.backward(trace, dlogits, g);
            }
        });
        std::vector<double> grad(p, 0.0);
        for (std::size_t e = 0; e < n_ep; ++e)
            for (std::size_t i = 0; i < p; ++i) grad[i] += block_grad[e][i];
        opt.step(result.net.params(), grad);
    }
    return result;
}

std::vector<PolicyEvalEpisode> evaluate_policy(const synth::SynthEnv& env,
                                               const synth::ExpertTables& tables,
                                               const FeedForwardNet& policy,
                                               const mdp::FeaturizerConfig& fcfg,
                                               int n_episodes, uint64_t seed,
                                               Exec mode) {
    const mdp::Dataset skeleton = make_skeleton(env);
    const std::vector<double> user_probs =
        synth::expert_policy(tables, tables.temperature);
    const SeededRng master(seed);
    std::vector<PolicyEvalEpisode> out(n_episodes);
    for_items(static_cast<std::size_t>(n_episodes), mode, [&](std::size_t e) {
        SeededRng rng = master.child("policy_eval", e);
        PolicyEpisode ep = rollout_policy_episode(
            env, user_probs, policy, skeleton, fcfg, env.cfg.episode_len, rng,
            nullptr);
        out[e] = {ep.true_reward_sum, ep.clicks, ep.steps};
    });
    return out;
}

std::vector<PolicyEvalEpisode> evaluate_recommender(
    const synth::SynthEnv& env, const synth::ExpertTables& tables,
    const FeedForwardNet& rec, const mdp::FeaturizerConfig& fcfg,
    int n_episodes, uint64_t seed, Exec mode) {
    const mdp::Dataset skeleton = make_skeleton(env);
    const std::vector<double> user_probs =
        synth::expert_policy(tables, tables.temperature);
    const SeededRng master(seed);
    std::vector<PolicyEvalEpisode> out(n_episodes);
    synth::ItemChooser choose = [&](std::span<const mdp::InteractionStep> hist,
                                    SeededRng&) {
        return rank_top_item(rec, hist, skeleton, fcfg);
    };
    for_items(static_cast<std::size_t>(n_episodes), mode, [&](std::size_t e) {
        SeededRng rng = master.child("rec_eval", e);
        synth::EpisodeRecord rec_ep =
            synth::run_episode(env, user_probs, choose, env.cfg.episode_len, rng);
        out[e] = {rec_ep.true_reward_sum, rec_ep.clicks,
                  static_cast<int>(rec_ep.steps.size())};
    });
    return out;
}

}  // namespace mtrec::align
