#pragma once

#include "mtrec/align/rec.hpp"
#include "mtrec/irl/reward.hpp"
#include "mtrec/synth/rollout.hpp"

namespace mtrec::align {

// Episode data kept for the policy update: per-step history features, the
// chosen catalog index, and the final (possibly reward-augmented) return.
struct PolicyEpisode {
    std::vector<std::vector<double>> hist_feats;
    std::vector<int> item_idx;
    double final_return = 0.0;
    double true_reward_sum = 0.0;
    int clicks = 0;
    int steps = 0;
};

struct PolicyTrainResult {
    FeedForwardNet net;
    std::vector<double> mean_return;  // training signal per iteration
};

// REINFORCE over catalog logits with a mean-return baseline. The per-step
// reward is the click indicator, augmented by kappa times the expectation of
// the recovered mental reward at the elicited action when kappa > 0 (qnet
// required then). Deterministic given the seed.
PolicyTrainResult train_policy(const synth::SynthEnv& env,
                               const synth::ExpertTables& tables,
                               const irl::QuantileQNetwork* qnet, double kappa,
                               double irl_gamma, const AlignConfig& cfg,
                               const mdp::FeaturizerConfig& fcfg, uint64_t seed,
                               Exec mode = Exec::parallel);

// Samples an episode from the softmax item policy; fills the per-step data
// and the env-only return (clicks). Mental-reward augmentation is applied by
// the caller.
PolicyEpisode rollout_policy_episode(const synth::SynthEnv& env,
                                     const std::vector<double>& user_probs,
                                     const FeedForwardNet& policy,
                                     const mdp::Dataset& skeleton,
                                     const mdp::FeaturizerConfig& fcfg,
                                     int episode_len, SeededRng& rng,
                                     std::vector<mdp::InteractionStep>* steps_out);

// Rolls n evaluation episodes (sampling the policy) and reports per-episode
// accumulated true mental reward, clicks, and steps.
struct PolicyEvalEpisode {
    double true_reward_sum = 0.0;
    int clicks = 0;
    int steps = 0;
};
std::vector<PolicyEvalEpisode> evaluate_policy(const synth::SynthEnv& env,
                                               const synth::ExpertTables& tables,
                                               const FeedForwardNet& policy,
                                               const mdp::FeaturizerConfig& fcfg,
                                               int n_episodes, uint64_t seed,
                                               Exec mode = Exec::parallel);

// Catalog-ranking recommender evaluation: at each step the candidate with
// the highest score is shown. Same reporting as evaluate_policy.
std::vector<PolicyEvalEpisode> evaluate_recommender(
    const synth::SynthEnv& env, const synth::ExpertTables& tables,
    const FeedForwardNet& rec, const mdp::FeaturizerConfig& fcfg,
    int n_episodes, uint64_t seed, Exec mode = Exec::parallel);

}  // namespace mtrec::align
