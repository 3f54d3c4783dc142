#pragma once

#include <functional>
#include <span>

#include "mtrec/mdp/types.hpp"
#include "mtrec/numerics/parallel.hpp"
#include "mtrec/synth/value_iteration.hpp"

namespace mtrec::synth {

// Picks the next catalog index given the episode so far. May consume rng.
using ItemChooser =
    std::function<int(std::span<const mdp::InteractionStep>, SeededRng&)>;

ItemChooser uniform_chooser(const SynthEnv& env);

struct EpisodeRecord {
    std::vector<mdp::InteractionStep> steps;
    std::vector<int> latent_ids;  // latent state at each decision
    double true_reward_sum = 0.0;
    int clicks = 0;
};

// Runs one session: the chooser supplies items, the user's action is drawn
// from policy_probs (indexed latent*2+action), the environment realizes the
// reward and transitions. Ends at episode_len or when the user leaves.
EpisodeRecord run_episode(const SynthEnv& env,
                          const std::vector<double>& policy_probs,
                          const ItemChooser& choose, int episode_len,
                          SeededRng& rng);

struct GenResult {
    mdp::Dataset dataset;
    // latent id per (trajectory, step), aligned with dataset.trajectories
    std::vector<std::vector<int>> latent_ids;
};

// Expert dataset generation under the uniform logging policy. Per-user
// streams are derived from (seed, user index); output order is fixed by the
// user index regardless of scheduling.
GenResult generate_trajectories(const SynthEnv& env, const ExpertTables& tables,
                                int n_users, int episode_len, uint64_t seed,
                                Exec mode = Exec::parallel);

}  // namespace mtrec::synth
