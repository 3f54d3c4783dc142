#include "mtrec/eval/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "mtrec/mdp/features.hpp"

namespace mtrec::eval {

using mdp::Action;

const std::array<const char*, 4> kRewardConditionNames = {
    "r_pos|a=pos", "r_neg|a=pos", "r_pos|a=neg", "r_neg|a=neg"};

StepMeanSeries reward_by_step(const mdp::Dataset& annotated, int s_max) {
    if (s_max < 1) throw std::invalid_argument("reward_by_step: S must be >= 1");
    StepMeanSeries series;
    series.mean.assign(s_max, 0.0);
    series.n.assign(s_max, 0);
    std::vector<double> sums(s_max, 0.0);
    for (const auto& traj : annotated.trajectories) {
        for (const auto& step : traj.steps) {
            if (step.step_index >= s_max) continue;
            const auto& r = step.action == Action::Positive
                                ? step.annotated_reward_pos
                                : step.annotated_reward_neg;
            if (!r)
                throw std::invalid_argument(
                    "reward_by_step: dataset is not annotated");
            sums[step.step_index] += *r;
            series.n[step.step_index] += 1;
        }
    }
    for (int t = 0; t < s_max; ++t)
        series.mean[t] = series.n[t] > 0 ? sums[t] / series.n[t] : 0.0;
    return series;
}

namespace {

Histogram make_hist(const std::vector<double>& xs, double lo, double hi, int bins) {
    Histogram h;
    h.bin_left.resize(bins);
    h.bin_right.resize(bins);
    h.count.assign(bins, 0);
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) {
        h.bin_left[b] = lo + b * width;
        h.bin_right[b] = lo + (b + 1) * width;
    }
    for (double x : xs) {
        int b = width > 0.0 ? static_cast<int>((x - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++h.count[b];
    }
    return h;
}

}  // namespace

RewardAnalysis conditional_reward_hists(const mdp::Dataset& annotated, int bins) {
    if (bins < 1)
        throw std::invalid_argument("conditional_reward_hists: bins must be >= 1");
    RewardAnalysis out;
    for (const auto& traj : annotated.trajectories) {
        for (const auto& step : traj.steps) {
            if (!step.annotated_reward_pos || !step.annotated_reward_neg)
                throw std::invalid_argument(
                    "conditional_reward_hists: dataset is not annotated");
            const bool pos = step.action == Action::Positive;
            out.samples[pos ? 0 : 2].push_back(*step.annotated_reward_pos);
            out.samples[pos ? 1 : 3].push_back(*step.annotated_reward_neg);
        }
    }
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& xs : out.samples)
        for (double x : xs) {
            if (!any) {
                lo = hi = x;
                any = true;
            }
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    for (int c = 0; c < 4; ++c) out.hists[c] = make_hist(out.samples[c], lo, hi, bins);
    return out;
}

double policy_agreement(const irl::QuantileQNetwork& qnet,
                        const synth::ExpertTables& tables,
                        const synth::SynthEnv& env, const mdp::Dataset& data,
                        const std::vector<std::vector<int>>& latent_ids,
                        const mdp::FeaturizerConfig& fcfg, Exec mode) {
    if (latent_ids.size() != data.trajectories.size())
        throw std::invalid_argument("policy_agreement: latent ids misaligned");
    // The learned Q of a latent state is its mean over the state's observed
    // feature encodings; visited states are compared as a set.
    std::vector<double> q_sum(static_cast<std::size_t>(env.n_latent()) * 2, 0.0);
    std::vector<long long> visits(env.n_latent(), 0);
    const int dim = mdp::feature_width(data.meta.embedding_dim, fcfg);
    const std::size_t n_traj = data.trajectories.size();
    std::vector<std::vector<double>> traj_q(n_traj);

    for_items(n_traj, mode, [&](std::size_t ti) {
        const auto& traj = data.trajectories[ti];
        if (latent_ids[ti].size() != traj.steps.size())
            throw std::invalid_argument("policy_agreement: latent ids misaligned");
        auto& q = traj_q[ti];
        q.resize(traj.steps.size() * 2);
        std::vector<double> feat(dim);
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            std::span<const mdp::InteractionStep> hist(traj.steps.data(), t);
            mdp::encode_state(hist, data.item(traj.steps[t].item_id), data, fcfg,
                              feat);
            const auto heads = qnet.heads(feat);
            q[t * 2] = qnet.q_value(heads, Action::Negative);
            q[t * 2 + 1] = qnet.q_value(heads, Action::Positive);
        }
    });
    for (std::size_t ti = 0; ti < n_traj; ++ti)
        for (std::size_t t = 0; t < latent_ids[ti].size(); ++t) {
            const auto sid = static_cast<std::size_t>(latent_ids[ti][t]);
            q_sum[sid * 2] += traj_q[ti][t * 2];
            q_sum[sid * 2 + 1] += traj_q[ti][t * 2 + 1];
            ++visits[sid];
        }

    long long agree = 0, total = 0;
    for (std::size_t sid = 0; sid < visits.size(); ++sid) {
        if (visits[sid] == 0) continue;
        const double q_neg = q_sum[sid * 2] / visits[sid];
        const double q_pos = q_sum[sid * 2 + 1] / visits[sid];
        const double t_neg = tables.q[sid * 2];
        const double t_pos = tables.q[sid * 2 + 1];
        // Ties count as agreement when the argmax sets intersect.
        const bool learned_pos = q_pos >= q_neg;
        const bool learned_neg = q_neg >= q_pos;
        const bool true_pos = t_pos >= t_neg;
        const bool true_neg = t_neg >= t_pos;
        if ((learned_pos && true_pos) || (learned_neg && true_neg)) ++agree;
        ++total;
    }
    if (total == 0) throw std::invalid_argument("policy_agreement: no visited states");
    return static_cast<double>(agree) / static_cast<double>(total);
}

RewardPairs collect_reward_pairs(const mdp::Dataset& annotated,
                                 const synth::ExpertTables& tables,
                                 const std::vector<std::vector<int>>& latent_ids) {
    if (latent_ids.size() != annotated.trajectories.size())
        throw std::invalid_argument("collect_reward_pairs: latent ids misaligned");
    // One entry per visited (latent state, action) pair: the recovered
    // expectation averaged over the pair's occurrences.
    std::unordered_map<long long, std::pair<double, long long>> acc;
    for (std::size_t ti = 0; ti < annotated.trajectories.size(); ++ti) {
        const auto& traj = annotated.trajectories[ti];
        if (latent_ids[ti].size() != traj.steps.size())
            throw std::invalid_argument("collect_reward_pairs: latent ids misaligned");
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const auto& step = traj.steps[t];
            if (!step.annotated_reward_pos || !step.annotated_reward_neg)
                throw std::invalid_argument(
                    "collect_reward_pairs: dataset is not annotated");
            const long long sid = latent_ids[ti][t];
            auto& pos = acc[sid * 2 + 1];
            pos.first += *step.annotated_reward_pos;
            pos.second += 1;
            auto& neg = acc[sid * 2];
            neg.first += *step.annotated_reward_neg;
            neg.second += 1;
        }
    }
    std::vector<long long> keys;
    keys.reserve(acc.size());
    for (const auto& [k, v] : acc) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    RewardPairs out;
    out.recovered.reserve(keys.size());
    out.truth.reserve(keys.size());
    for (long long k : keys) {
        const auto& [sum, n] = acc.at(k);
        out.recovered.push_back(sum / static_cast<double>(n));
        out.truth.push_back(tables.r_true_mean[static_cast<std::size_t>(k)]);
    }
    return out;
}

}  // namespace mtrec::eval
