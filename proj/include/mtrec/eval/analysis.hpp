#pragma once

#include <array>

#include "mtrec/eval/metrics.hpp"
#include "mtrec/irl/qnet.hpp"
#include "mtrec/synth/value_iteration.hpp"

namespace mtrec::eval {

// Mean recovered reward at the taken action per step index 0..S-1, with
// sample counts.
struct StepMeanSeries {
    std::vector<double> mean;
    std::vector<long long> n;
};
StepMeanSeries reward_by_step(const mdp::Dataset& annotated, int s_max);

struct Histogram {
    std::vector<double> bin_left, bin_right;
    std::vector<long long> count;
};

// Condition order: factual Positive (r_pos | a=P), counterfactual
// (r_neg | a=P), counterfactual (r_pos | a=N), factual Negative (r_neg | a=N).
extern const std::array<const char*, 4> kRewardConditionNames;

struct RewardAnalysis {
    std::array<std::vector<double>, 4> samples;
    std::array<Histogram, 4> hists;
};

// Histograms share `bins` equal bins over the pooled observed range.
RewardAnalysis conditional_reward_hists(const mdp::Dataset& annotated, int bins);

// Fraction of visited steps where the greedy action of the learned Q-network
// matches the expert tables' greedy action; ties agree when the argmax sets
// intersect. latent_ids must align with the dataset trajectories.
double policy_agreement(const irl::QuantileQNetwork& qnet,
                        const synth::ExpertTables& tables,
                        const synth::SynthEnv& env, const mdp::Dataset& data,
                        const std::vector<std::vector<int>>& latent_ids,
                        const mdp::FeaturizerConfig& fcfg,
                        Exec mode = Exec::parallel);

// Visited (state, action) pairs: recovered expectations beside the oracle's
// ground-truth reward means, two entries per step.
struct RewardPairs {
    std::vector<double> recovered;
    std::vector<double> truth;
};
RewardPairs collect_reward_pairs(const mdp::Dataset& annotated,
                                 const synth::ExpertTables& tables,
                                 const std::vector<std::vector<int>>& latent_ids);

}  // namespace mtrec::eval
