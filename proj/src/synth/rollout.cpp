#include "mtrec/synth/rollout.hpp"

#include <stdexcept>

namespace mtrec::synth {

using mdp::Action;

ItemChooser uniform_chooser(const SynthEnv& env) {
    const int n = static_cast<int>(env.catalog.size());
    return [n](std::span<const mdp::InteractionStep>, SeededRng& rng) {
        return rng.uniform_int(n);
    };
}

EpisodeRecord run_episode(const SynthEnv& env,
                          const std::vector<double>& policy_probs,
                          const ItemChooser& choose, int episode_len,
                          SeededRng& rng) {
    if (episode_len < 1)
        throw std::invalid_argument("run_episode: episode_len must be >= 1");
    if (policy_probs.size() != static_cast<std::size_t>(env.n_latent()) * 2)
        throw std::invalid_argument("run_episode: policy table size mismatch");

    EpisodeRecord rec;
    rec.steps.reserve(episode_len);
    LatentUserState latent = env.initial_latent();
    int item_idx = choose(rec.steps, rng);

    for (int t = 0; t < episode_len; ++t) {
        const mdp::Item& item = env.catalog[item_idx];
        latent.item_topic = item.topic;
        latent.item_clickbait = item.clickbait;
        const int sid = env.encode(latent);
        rec.latent_ids.push_back(sid);

        const double p_click = policy_probs[static_cast<std::size_t>(sid) * 2 + 1];
        const Action action =
            rng.uniform() < p_click ? Action::Positive : Action::Negative;
        const StepOutcome out = env_step(env, latent, item, action, rng);

        mdp::InteractionStep step;
        step.item_id = item.id;
        step.action = action;
        step.step_index = t;
        step.realized_true_reward = out.reward;
        rec.steps.push_back(std::move(step));
        rec.true_reward_sum += out.reward;
        if (action == Action::Positive) ++rec.clicks;

        latent.interests = out.next.interests;
        latent.fatigue = out.next.fatigue;
        if (out.left || t + 1 == episode_len) break;
        item_idx = choose(rec.steps, rng);
    }
    return rec;
}

GenResult generate_trajectories(const SynthEnv& env, const ExpertTables& tables,
                                int n_users, int episode_len, uint64_t seed,
                                Exec mode) {
    if (n_users < 1)
        throw std::invalid_argument("generate_trajectories: n_users must be >= 1");
    if (tables.v.size() != static_cast<std::size_t>(env.n_latent()))
        throw std::invalid_argument("generate_trajectories: tables do not match env");

    const std::vector<double> probs = expert_policy(tables, tables.temperature);
    const SeededRng master(seed);
    const ItemChooser choose = uniform_chooser(env);

    std::vector<EpisodeRecord> episodes(n_users);
    for_items(static_cast<std::size_t>(n_users), mode, [&](std::size_t u) {
        SeededRng rng = master.child("traj", u);
        episodes[u] = run_episode(env, probs, choose, episode_len, rng);
    });

    GenResult out;
    out.dataset.meta.schema_version = 1;
    out.dataset.meta.seed = seed;
    out.dataset.meta.embedding_dim = env.cfg.topics + 1;
    out.dataset.meta.env_config_hash = env.config_hash;
    out.dataset.catalog = env.catalog;
    out.dataset.rebuild_index();
    out.dataset.trajectories.reserve(n_users);
    out.latent_ids.reserve(n_users);
    for (int u = 0; u < n_users; ++u) {
        mdp::Trajectory traj;
        traj.user_id = u;
        traj.traj_id = u;
        traj.steps = std::move(episodes[u].steps);
        for (auto& s : traj.steps) s.user_id = u;
        out.dataset.trajectories.push_back(std::move(traj));
        out.latent_ids.push_back(std::move(episodes[u].latent_ids));
    }
    return out;
}

}  // namespace mtrec::synth
