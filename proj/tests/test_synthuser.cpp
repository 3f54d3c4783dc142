#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/synth/rollout.hpp"
#include "mtrec/synth/value_iteration.hpp"

using namespace mtrec;
using namespace mtrec::synth;
using mdp::Action;

namespace {

// Single latent state: one topic, one interest level, one fatigue bucket,
// no exit, no noise.
EnvConfig degenerate_config() {
    EnvConfig c;
    c.topics = 1;
    c.interest_levels = 1;
    c.fatigue_levels = 1;
    c.n_items = 1;
    c.clickbait_fraction = 0.0;
    c.embedding_noise_std = 0.0;
    c.leave_base = 0.0;
    c.leave_fatigue = 0.0;
    c.leave_bad_reward = 0.0;
    return c;
}

}  // namespace

TEST_CASE("build_env: degenerate config has two latent states (item fixed)") {
    EnvConfig c = degenerate_config();
    const SynthEnv env = build_env(c, 1);
    // One interest code, one fatigue bucket, one topic, clickbait flag in {0,1}.
    CHECK(env.n_latent() == 2);
    CHECK(env.catalog.size() == 1);
    CHECK(env.catalog[0].embedding.size() == 2);
}

TEST_CASE("build_env: determinism and clickbait rounding") {
    EnvConfig c;
    c.n_items = 10;
    c.clickbait_fraction = 0.5;
    const SynthEnv a = build_env(c, 33);
    const SynthEnv b = build_env(c, 33);
    int n_cb = 0;
    for (std::size_t i = 0; i < a.catalog.size(); ++i) {
        CHECK(a.catalog[i].embedding == b.catalog[i].embedding);
        if (a.catalog[i].clickbait) ++n_cb;
    }
    CHECK(n_cb == 5);
    const SynthEnv other = build_env(c, 34);
    CHECK(a.catalog[0].embedding != other.catalog[0].embedding);
}

TEST_CASE("build_env: state-count guard") {
    EnvConfig c;
    c.topics = 8;
    c.interest_levels = 5;  // 8 * 5^8 * K blows the guard
    CHECK_THROWS_AS(build_env(c, 1), std::invalid_argument);
}

TEST_CASE("latent encode/decode round-trips") {
    EnvConfig c;
    c.topics = 3;
    c.interest_levels = 2;
    c.fatigue_levels = 2;
    const SynthEnv env = build_env(c, 2);
    for (int id = 0; id < env.n_latent(); ++id)
        CHECK(env.encode(env.decode(id)) == id);
}

TEST_CASE("soft_value_iteration: single self-loop state closed form") {
    // Both actions give expected reward 0; V = ln 2 + gamma V => V = 2 ln 2.
    EnvConfig c = degenerate_config();
    c.base_pos = 0.0;
    c.neg_base = 0.0;
    c.sigma_pos = 0.0;
    c.sigma_neg = 0.0;
    c.gamma = 0.5;
    const SynthEnv env = build_env(c, 1);
    const ExpertTables tab = soft_value_iteration(env, 0.5, 1e-12);
    const double expected = std::log(2.0) / (1.0 - 0.5);
    for (double v : tab.v) CHECK(v == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::log(2.0) / 0.5 == doctest::Approx(1.3862943611).epsilon(1e-9));
}

TEST_CASE("soft_value_iteration: gamma = 0 returns the decision rewards") {
    EnvConfig c;
    c.topics = 2;
    c.interest_levels = 2;
    c.fatigue_levels = 2;
    c.n_items = 6;
    const SynthEnv env = build_env(c, 3);
    const ExpertTables tab = soft_value_iteration(env, 0.0, 1e-12);
    for (int sid = 0; sid < env.n_latent(); ++sid) {
        const auto s = env.decode(sid);
        CHECK(tab.q[sid * 2] ==
              doctest::Approx(env.decision_reward(s, Action::Negative))
                  .epsilon(1e-12));
        CHECK(tab.q[sid * 2 + 1] ==
              doctest::Approx(env.decision_reward(s, Action::Positive))
                  .epsilon(1e-12));
    }
}

TEST_CASE("soft_value_iteration: residuals shrink monotonically to tol") {
    EnvConfig c;
    c.topics = 2;
    c.interest_levels = 2;
    c.fatigue_levels = 3;
    c.n_items = 8;
    const SynthEnv env = build_env(c, 4);
    const ExpertTables tab = soft_value_iteration(env, 0.9, 1e-10);
    REQUIRE(!tab.residuals.empty());
    for (std::size_t i = 1; i < tab.residuals.size(); ++i)
        CHECK(tab.residuals[i] <= tab.residuals[i - 1] + 1e-12);
    CHECK(tab.residuals.back() < 1e-10);
    // V is the temperature-scaled logsumexp of Q.
    for (int sid = 0; sid < env.n_latent(); ++sid) {
        const double t = tab.temperature;
        const double lse =
            t * std::log(std::exp(tab.q[sid * 2] / t) +
                         std::exp(tab.q[sid * 2 + 1] / t));
        CHECK(tab.v[sid] == doctest::Approx(lse).epsilon(1e-8));
    }
}

TEST_CASE("soft_value_iteration: reward shift moves V by c/(1-gamma), policy fixed") {
    EnvConfig base;
    base.topics = 2;
    base.interest_levels = 2;
    base.fatigue_levels = 2;
    base.n_items = 6;
    base.leave_base = 0.0;
    base.leave_fatigue = 0.0;
    base.leave_bad_reward = 0.0;
    const double c = 0.75;
    EnvConfig shifted = base;
    shifted.base_pos += c;
    shifted.neg_base += c;
    shifted.drift_baseline += c;  // keeps the transition kernel identical

    const SynthEnv env_a = build_env(base, 5);
    const SynthEnv env_b = build_env(shifted, 5);
    const ExpertTables ta = soft_value_iteration(env_a, 0.9, 1e-12);
    const ExpertTables tb = soft_value_iteration(env_b, 0.9, 1e-12);
    const double shift = c / (1.0 - 0.9);
    const auto pa = expert_policy(ta, ta.temperature);
    const auto pb = expert_policy(tb, tb.temperature);
    for (int sid = 0; sid < env_a.n_latent(); ++sid) {
        CHECK(tb.v[sid] == doctest::Approx(ta.v[sid] + shift).epsilon(1e-6));
        CHECK(pb[sid * 2] == doctest::Approx(pa[sid * 2]).epsilon(1e-8));
    }
}

TEST_CASE("soft_value_iteration: non-convergence raises numeric_error") {
    EnvConfig c = degenerate_config();
    const SynthEnv env = build_env(c, 1);
    CHECK_THROWS_AS(soft_value_iteration(env, 0.99, 1e-12, 3),
                    numeric_error);
}

TEST_CASE("expert_policy worked examples") {
    ExpertTables tab;
    tab.temperature = 1.0;
    tab.q = {0.0, 0.0, 0.0, 1.0};  // state 0: tie; state 1: Q_N=0, Q_P=1
    tab.v = {0.0, 0.0};
    const auto p = expert_policy(tab, 1.0);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.2689414213699951).epsilon(1e-9));
    CHECK(p[3] == doctest::Approx(0.7310585786300049).epsilon(1e-9));
    // Large temperature approaches uniform.
    const auto hot = expert_policy(tab, 1e6);
    CHECK(hot[3] == doctest::Approx(0.5).epsilon(1e-5));
    // Probabilities sum to 1 per state.
    for (int s = 0; s < 2; ++s)
        CHECK(p[s * 2] + p[s * 2 + 1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("env_step: zero stddev gives the mean exactly") {
    EnvConfig c = degenerate_config();
    c.base_pos = 0.4;
    c.sigma_pos = 0.0;
    const SynthEnv env = build_env(c, 6);
    SeededRng rng(1);
    const LatentUserState s = env.initial_latent();
    const StepOutcome out = env_step(env, s, env.catalog[0], Action::Positive, rng);
    CHECK(out.reward == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("env_step: interest clamps at the top bucket, fatigue clamps at K-1") {
    EnvConfig c;
    c.topics = 1;
    c.interest_levels = 3;
    c.fatigue_levels = 2;
    c.n_items = 2;
    c.clickbait_fraction = 0.0;
    c.sigma_pos = 0.0;
    c.base_pos = 2.5;          // always a positive surprise
    c.interest_drift_rate = 1.0;
    const SynthEnv env = build_env(c, 7);
    LatentUserState s = env.initial_latent();
    s.interests[0] = 2;  // top bucket
    s.fatigue = 1;       // top bucket
    SeededRng rng(2);
    const StepOutcome out = env_step(env, s, env.catalog[0], Action::Positive, rng);
    CHECK(out.next.interests[0] == 2);
    CHECK(out.next.fatigue == 1);
}

TEST_CASE("env_step: K = 1 keeps fatigue at zero") {
    EnvConfig c = degenerate_config();
    const SynthEnv env = build_env(c, 8);
    SeededRng rng(3);
    LatentUserState s = env.initial_latent();
    for (int i = 0; i < 10; ++i) {
        const auto out = env_step(env, s, env.catalog[0],
                                  i % 2 ? Action::Positive : Action::Negative, rng);
        CHECK(out.next.fatigue == 0);
        s = out.next;
    }
}

TEST_CASE("true_reward_lookup reflects the construction invariants") {
    EnvConfig c;  // defaults: clickbait penalty and fatigue penalty positive
    const SynthEnv env = build_env(c, 9);
    LatentUserState s = env.initial_latent();
    s.item_topic = 0;
    s.item_clickbait = false;
    const auto [mean_plain, std_plain] = true_reward_lookup(env, s, Action::Positive);
    LatentUserState s_cb = s;
    s_cb.item_clickbait = true;
    const auto [mean_cb, std_cb] = true_reward_lookup(env, s_cb, Action::Positive);
    CHECK(mean_cb < mean_plain);
    CHECK(std_cb > std_plain);
    LatentUserState tired = s;
    tired.fatigue = c.fatigue_levels - 1;
    const auto [mean_tired, std_tired] =
        true_reward_lookup(env, tired, Action::Positive);
    CHECK(mean_tired < mean_plain);
    CHECK(std_tired == std_plain);
    const auto [mean_neg_fresh, sn1] = true_reward_lookup(env, s, Action::Negative);
    const auto [mean_neg_tired, sn2] =
        true_reward_lookup(env, tired, Action::Negative);
    CHECK(mean_neg_tired < mean_neg_fresh);
    CHECK(sn1 == sn2);
}

TEST_CASE("generate_trajectories: determinism and length contract") {
    EnvConfig c;
    c.n_users = 12;
    c.leave_base = 0.0;
    c.leave_fatigue = 0.0;
    c.leave_bad_reward = 0.0;  // exit disabled: every trajectory runs full length
    const SynthEnv env = build_env(c, 10);
    const ExpertTables tab = soft_value_iteration(env, c.gamma, 1e-9);
    const GenResult a = generate_trajectories(env, tab, 12, 10, 99);
    const GenResult b = generate_trajectories(env, tab, 12, 10, 99);
    CHECK(a.dataset == b.dataset);
    CHECK(a.latent_ids == b.latent_ids);
    CHECK(a.dataset.trajectories.size() == 12);
    for (const auto& t : a.dataset.trajectories) {
        CHECK(t.steps.size() == 10);
        for (std::size_t i = 0; i < t.steps.size(); ++i) {
            CHECK(t.steps[i].step_index == static_cast<int>(i));
            CHECK(t.steps[i].realized_true_reward.has_value());
        }
    }
    const GenResult other = generate_trajectories(env, tab, 12, 10, 100);
    CHECK(!(other.dataset == a.dataset));
    CHECK_THROWS_AS(generate_trajectories(env, tab, 0, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("generated data: fatigue drives rewards down across steps") {
    EnvConfig c;
    c.n_users = 1000;
    const SynthEnv env = build_env(c, 11);
    const ExpertTables tab = soft_value_iteration(env, c.gamma, 1e-9);
    const GenResult gen = generate_trajectories(env, tab, c.n_users, 10, 12);
    double early = 0.0, late = 0.0;
    long n_early = 0, n_late = 0;
    for (const auto& t : gen.dataset.trajectories)
        for (const auto& s : t.steps) {
            if (s.step_index == 0) {
                early += *s.realized_true_reward;
                ++n_early;
            } else if (s.step_index == 9) {
                late += *s.realized_true_reward;
                ++n_late;
            }
        }
    REQUIRE(n_early > 0);
    REQUIRE(n_late > 0);
    CHECK(late / n_late < early / n_early);
}

TEST_CASE("generated data: clickbait is clicked more yet satisfies less") {
    EnvConfig c;  // default config must exhibit the phenomenon
    c.n_users = 1500;
    const SynthEnv env = build_env(c, 13);
    const ExpertTables tab = soft_value_iteration(env, c.gamma, 1e-9);
    const GenResult gen =
        generate_trajectories(env, tab, c.n_users, c.episode_len, 14);
    long cb_shown = 0, cb_click = 0, ncb_shown = 0, ncb_click = 0;
    double cb_reward = 0.0, ncb_reward = 0.0;
    for (const auto& t : gen.dataset.trajectories)
        for (const auto& s : t.steps) {
            const bool cb = gen.dataset.item(s.item_id).clickbait;
            (cb ? cb_shown : ncb_shown)++;
            if (s.action == Action::Positive) {
                (cb ? cb_click : ncb_click)++;
                (cb ? cb_reward : ncb_reward) += *s.realized_true_reward;
            }
        }
    const double p_cb = static_cast<double>(cb_click) / cb_shown;
    const double p_ncb = static_cast<double>(ncb_click) / ncb_shown;
    CHECK(p_cb > p_ncb);
    CHECK(cb_reward / cb_click < ncb_reward / ncb_click);
}
