#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtrec/mdp/types.hpp"
#include "mtrec/numerics/rng.hpp"

namespace mtrec::synth {

// Latent simulator state: per-topic interest buckets, a fatigue bucket, and
// the currently displayed item's topic and clickbait flag.
struct LatentUserState {
    std::vector<int> interests;
    int fatigue = 0;
    int item_topic = 0;
    bool item_clickbait = false;
};

struct EnvConfig {
    int topics = 4;
    int interest_levels = 3;
    int fatigue_levels = 4;
    int n_items = 40;
    double clickbait_fraction = 0.25;
    // Probability the +-1 interest move applies after a Positive action.
    double interest_drift_rate = 0.8;
    // Probability fatigue increments after a Negative action.
    double negative_fatigue_prob = 0.5;
    double gamma = 0.9;
    double expert_temperature = 1.0;
    double r_min = -3.0;
    double r_max = 3.0;
    double embedding_noise_std = 0.1;
    // Realized reward above this moves the shown topic's interest up, below
    // moves it down.
    double drift_baseline = 0.0;

    // Ground-truth mental reward shape.
    double base_pos = 0.8;
    // Fixed per-topic quality offsets on Positive rewards, spread linearly
    // over [-spread/2, +spread/2] across topics.
    double topic_quality_spread = 1.2;
    double interest_gain = 0.6;
    double fatigue_penalty = 2.0;
    double clickbait_penalty = 1.5;
    double neg_base = 0.1;
    double neg_fatigue_penalty = 0.5;
    double sigma_pos = 0.5;
    double sigma_clickbait = 2.0;
    double sigma_neg = 0.4;

    // Pre-click appeal of clickbait as seen at decision time; enters the
    // behavioral value iteration but never the realized reward.
    double clickbait_appeal = 2.0;
    double clickbait_appeal_low_fatigue = 0.5;

    // Session-exit model: P(leave) after a step.
    double leave_base = 0.01;
    double leave_fatigue = 0.04;
    double leave_bad_reward = 0.03;

    // Trajectory generation.
    int episode_len = 20;
    int n_users = 1000;

    bool operator==(const EnvConfig&) const = default;
};

nlohmann::json env_config_to_json(const EnvConfig& cfg);
EnvConfig env_config_from_json(const nlohmann::json& j, const std::string& where);
std::string env_config_hash(const EnvConfig& cfg);

class SynthEnv {
public:
    EnvConfig cfg;
    std::vector<mdp::Item> catalog;
    std::string config_hash;

    int n_interest_codes() const;  // interest_levels ^ topics
    int n_latent() const;          // interest codes * K * T * 2

    int encode(const LatentUserState& s) const;
    LatentUserState decode(int id) const;
    int interest_code(const std::vector<int>& interests) const;

    LatentUserState initial_latent() const;

    double reward_mean(const LatentUserState& s, mdp::Action a) const;
    double reward_std(const LatentUserState& s, mdp::Action a) const;
    // Ground-truth mean plus the clickbait appeal wedge; what the behavioral
    // policy optimizes.
    double decision_reward(const LatentUserState& s, mdp::Action a) const;

    // Marginal catalog frequency of each (topic, clickbait) pair.
    const std::vector<double>& item_marginal() const { return item_marginal_; }

    // Continuation outcomes of (s, a): probability mass per next
    // (interest code, fatigue), exclusive of session exit. The missing mass
    // is the expected leave probability.
    struct Outcome {
        int interest_code;
        int fatigue;
        double prob;
    };
    void continue_outcomes(const LatentUserState& s, mdp::Action a,
                           std::vector<Outcome>& out) const;

    friend SynthEnv build_env(const EnvConfig& cfg, uint64_t seed);

private:
    std::vector<double> item_marginal_;  // indexed topic*2 + clickbait
};

// Deterministic environment construction: catalog embeddings are topic
// one-hot plus a clickbait flag plus Gaussian noise. Throws on config-guard
// violations (T * L^T * K must stay at or below 20000).
SynthEnv build_env(const EnvConfig& cfg, uint64_t seed);

struct StepOutcome {
    double reward = 0.0;
    LatentUserState next;
    bool left = false;
};

// One environment transition. The reward is drawn from the clamped Normal
// ground truth; Positive actions drift the shown topic's interest by the
// reward sign and always increment fatigue; Negative actions increment
// fatigue with probability negative_fatigue_prob. `next` keeps the current
// item's fields; the caller overwrites them when the next item is drawn.
StepOutcome env_step(const SynthEnv& env, const LatentUserState& s,
                     const mdp::Item& item, mdp::Action a, SeededRng& rng);

// Oracle access for evaluation only: (mean, std) of the ground-truth reward.
std::pair<double, double> true_reward_lookup(const SynthEnv& env,
                                             const LatentUserState& s,
                                             mdp::Action a);

}  // namespace mtrec::synth
