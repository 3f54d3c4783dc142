#include "mtrec/synth/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtrec/common.hpp"

namespace mtrec::synth {

using mdp::Action;

namespace {

constexpr uint64_t kLatentGuard = 20000;

double norm_bucket(int b, int n) {
    return n > 1 ? static_cast<double>(b) / (n - 1) : 0.0;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(clamped draw > thr) for Normal(mu, sigma) clamped to [lo, hi].
double prob_above(double mu, double sigma, double lo, double hi, double thr) {
    if (thr < lo) return 1.0;
    if (thr >= hi) return 0.0;
    if (sigma == 0.0) return std::clamp(mu, lo, hi) > thr ? 1.0 : 0.0;
    return 1.0 - normal_cdf((thr - mu) / sigma);
}

void validate(const EnvConfig& c) {
    if (c.topics < 1 || c.interest_levels < 1 || c.fatigue_levels < 1)
        throw std::invalid_argument("env: topics/levels/buckets must be >= 1");
    if (c.n_items < 1) throw std::invalid_argument("env: n_items must be >= 1");
    if (!(c.clickbait_fraction >= 0.0 && c.clickbait_fraction <= 1.0))
        throw std::invalid_argument("env: clickbait_fraction must be in [0,1]");
    if (!(c.interest_drift_rate >= 0.0 && c.interest_drift_rate <= 1.0))
        throw std::invalid_argument("env: interest_drift_rate must be in [0,1]");
    if (!(c.negative_fatigue_prob >= 0.0 && c.negative_fatigue_prob <= 1.0))
        throw std::invalid_argument("env: negative_fatigue_prob must be in [0,1]");
    if (!(c.gamma >= 0.0 && c.gamma < 1.0))
        throw std::invalid_argument("env: gamma must be in [0,1)");
    if (!(c.expert_temperature > 0.0))
        throw std::invalid_argument("env: expert_temperature must be positive");
    if (!(c.r_min < c.r_max)) throw std::invalid_argument("env: r_min must be < r_max");
    if (c.sigma_pos < 0.0 || c.sigma_clickbait < 0.0 || c.sigma_neg < 0.0)
        throw std::invalid_argument("env: reward stddevs must be >= 0");
    if (!(c.clickbait_penalty > 0.0))
        throw std::invalid_argument("env: clickbait_penalty must be positive");
    if (c.leave_base < 0.0 || c.leave_fatigue < 0.0 || c.leave_bad_reward < 0.0)
        throw std::invalid_argument("env: leave probabilities must be >= 0");
    uint64_t guard = c.topics;
    for (int i = 0; i < c.topics; ++i) {
        guard *= static_cast<uint64_t>(c.interest_levels);
        if (guard > kLatentGuard * 1000) break;
    }
    guard *= static_cast<uint64_t>(c.fatigue_levels);
    if (guard > kLatentGuard)
        throw std::invalid_argument(
            "env: latent state count T*L^T*K exceeds the 20000 guard");
}

}  // namespace

nlohmann::json env_config_to_json(const EnvConfig& c) {
    nlohmann::json j;
    j["topics"] = c.topics;
    j["interest_levels"] = c.interest_levels;
    j["fatigue_levels"] = c.fatigue_levels;
    j["n_items"] = c.n_items;
    j["clickbait_fraction"] = c.clickbait_fraction;
    j["interest_drift_rate"] = c.interest_drift_rate;
    j["negative_fatigue_prob"] = c.negative_fatigue_prob;
    j["gamma"] = c.gamma;
    j["expert_temperature"] = c.expert_temperature;
    j["r_min"] = c.r_min;
    j["r_max"] = c.r_max;
    j["embedding_noise_std"] = c.embedding_noise_std;
    j["drift_baseline"] = c.drift_baseline;
    j["base_pos"] = c.base_pos;
    j["topic_quality_spread"] = c.topic_quality_spread;
    j["interest_gain"] = c.interest_gain;
    j["fatigue_penalty"] = c.fatigue_penalty;
    j["clickbait_penalty"] = c.clickbait_penalty;
    j["neg_base"] = c.neg_base;
    j["neg_fatigue_penalty"] = c.neg_fatigue_penalty;
    j["sigma_pos"] = c.sigma_pos;
    j["sigma_clickbait"] = c.sigma_clickbait;
    j["sigma_neg"] = c.sigma_neg;
    j["clickbait_appeal"] = c.clickbait_appeal;
    j["clickbait_appeal_low_fatigue"] = c.clickbait_appeal_low_fatigue;
    j["leave_base"] = c.leave_base;
    j["leave_fatigue"] = c.leave_fatigue;
    j["leave_bad_reward"] = c.leave_bad_reward;
    j["episode_len"] = c.episode_len;
    j["n_users"] = c.n_users;
    return j;
}

EnvConfig env_config_from_json(const nlohmann::json& j, const std::string& where) {
    EnvConfig c;
    const nlohmann::json defaults = env_config_to_json(c);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!defaults.contains(it.key()))
            throw config_error(where + ": unknown key '" + it.key() + "'");
    auto num = [&](const char* key, double fallback) {
        return j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    auto integer = [&](const char* key, int fallback) {
        return j.contains(key) ? j.at(key).get<int>() : fallback;
    };
    c.topics = integer("topics", c.topics);
    c.interest_levels = integer("interest_levels", c.interest_levels);
    c.fatigue_levels = integer("fatigue_levels", c.fatigue_levels);
    c.n_items = integer("n_items", c.n_items);
    c.clickbait_fraction = num("clickbait_fraction", c.clickbait_fraction);
    c.interest_drift_rate = num("interest_drift_rate", c.interest_drift_rate);
    c.negative_fatigue_prob = num("negative_fatigue_prob", c.negative_fatigue_prob);
    c.gamma = num("gamma", c.gamma);
    c.expert_temperature = num("expert_temperature", c.expert_temperature);
    c.r_min = num("r_min", c.r_min);
    c.r_max = num("r_max", c.r_max);
    c.embedding_noise_std = num("embedding_noise_std", c.embedding_noise_std);
    c.drift_baseline = num("drift_baseline", c.drift_baseline);
    c.base_pos = num("base_pos", c.base_pos);
    c.topic_quality_spread = num("topic_quality_spread", c.topic_quality_spread);
    c.interest_gain = num("interest_gain", c.interest_gain);
    c.fatigue_penalty = num("fatigue_penalty", c.fatigue_penalty);
    c.clickbait_penalty = num("clickbait_penalty", c.clickbait_penalty);
    c.neg_base = num("neg_base", c.neg_base);
    c.neg_fatigue_penalty = num("neg_fatigue_penalty", c.neg_fatigue_penalty);
    c.sigma_pos = num("sigma_pos", c.sigma_pos);
    c.sigma_clickbait = num("sigma_clickbait", c.sigma_clickbait);
    c.sigma_neg = num("sigma_neg", c.sigma_neg);
    c.clickbait_appeal = num("clickbait_appeal", c.clickbait_appeal);
    c.clickbait_appeal_low_fatigue =
        num("clickbait_appeal_low_fatigue", c.clickbait_appeal_low_fatigue);
    c.leave_base = num("leave_base", c.leave_base);
    c.leave_fatigue = num("leave_fatigue", c.leave_fatigue);
    c.leave_bad_reward = num("leave_bad_reward", c.leave_bad_reward);
    c.episode_len = integer("episode_len", c.episode_len);
    c.n_users = integer("n_users", c.n_users);
    return c;
}

std::string env_config_hash(const EnvConfig& cfg) {
    // Alphabetical key order gives a canonical serialization.
    const std::string canonical = nlohmann::json(env_config_to_json(cfg)).dump();
    return to_hex(fnv1a64(canonical));
}

int SynthEnv::n_interest_codes() const {
    int n = 1;
    for (int i = 0; i < cfg.topics; ++i) n *= cfg.interest_levels;
    return n;
}

int SynthEnv::n_latent() const {
    return n_interest_codes() * cfg.fatigue_levels * cfg.topics * 2;
}

int SynthEnv::interest_code(const std::vector<int>& interests) const {
    int code = 0;
    for (int i = cfg.topics - 1; i >= 0; --i)
        code = code * cfg.interest_levels + interests[i];
    return code;
}

int SynthEnv::encode(const LatentUserState& s) const {
    const int code = interest_code(s.interests);
    return ((code * cfg.fatigue_levels + s.fatigue) * cfg.topics + s.item_topic) * 2 +
           (s.item_clickbait ? 1 : 0);
}

LatentUserState SynthEnv::decode(int id) const {
    LatentUserState s;
    s.item_clickbait = (id & 1) != 0;
    id >>= 1;
    s.item_topic = id % cfg.topics;
    id /= cfg.topics;
    s.fatigue = id % cfg.fatigue_levels;
    id /= cfg.fatigue_levels;
    s.interests.resize(cfg.topics);
    for (int i = 0; i < cfg.topics; ++i) {
        s.interests[i] = id % cfg.interest_levels;
        id /= cfg.interest_levels;
    }
    return s;
}

LatentUserState SynthEnv::initial_latent() const {
    LatentUserState s;
    s.interests.assign(cfg.topics, cfg.interest_levels / 2);
    s.fatigue = 0;
    return s;
}

double SynthEnv::reward_mean(const LatentUserState& s, Action a) const {
    const double nf = norm_bucket(s.fatigue, cfg.fatigue_levels);
    if (a == Action::Negative) return cfg.neg_base - cfg.neg_fatigue_penalty * nf;
    const double ni = cfg.interest_levels > 1
                          ? norm_bucket(s.interests[s.item_topic], cfg.interest_levels)
                          : 0.5;
    const double quality =
        cfg.topics > 1
            ? cfg.topic_quality_spread *
                  (norm_bucket(s.item_topic, cfg.topics) - 0.5)
            : 0.0;
    double mu = cfg.base_pos + quality + cfg.interest_gain * (2.0 * ni - 1.0) -
                cfg.fatigue_penalty * nf;
    if (s.item_clickbait) mu -= cfg.clickbait_penalty;
    return mu;
}

double SynthEnv::reward_std(const LatentUserState& s, Action a) const {
    if (a == Action::Negative) return cfg.sigma_neg;
    return s.item_clickbait ? cfg.sigma_clickbait : cfg.sigma_pos;
}

double SynthEnv::decision_reward(const LatentUserState& s, Action a) const {
    double r = reward_mean(s, a);
    if (a == Action::Positive && s.item_clickbait) {
        const double nf = norm_bucket(s.fatigue, cfg.fatigue_levels);
        r += cfg.clickbait_appeal + cfg.clickbait_appeal_low_fatigue * (1.0 - nf);
    }
    return r;
}

void SynthEnv::continue_outcomes(const LatentUserState& s, Action a,
                                 std::vector<Outcome>& out) const {
    out.clear();
    const double mu = reward_mean(s, a);
    const double sigma = reward_std(s, a);
    const int code = interest_code(s.interests);
    const double p_bad = 1.0 - prob_above(mu, sigma, cfg.r_min, cfg.r_max, 0.0);

    auto leave_prob = [&](int fatigue, bool bad) {
        return std::min(1.0, cfg.leave_base +
                                 cfg.leave_fatigue *
                                     norm_bucket(fatigue, cfg.fatigue_levels) +
                                 (bad ? cfg.leave_bad_reward : 0.0));
    };
    auto add = [&](int c, int f, double p) {
        if (p <= 0.0) return;
        for (auto& o : out)
            if (o.interest_code == c && o.fatigue == f) {
                o.prob += p;
                return;
            }
        out.push_back({c, f, p});
    };

    if (a == Action::Negative) {
        // No interest drift; fatigue coin and reward sign are independent.
        const int f_up = std::min(s.fatigue + 1, cfg.fatigue_levels - 1);
        const double p_inc = cfg.negative_fatigue_prob;
        for (const auto& [f2, pf] :
             {std::pair{f_up, p_inc}, std::pair{s.fatigue, 1.0 - p_inc}}) {
            if (pf <= 0.0) continue;
            const double stay =
                pf * (p_bad * (1.0 - leave_prob(f2, true)) +
                      (1.0 - p_bad) * (1.0 - leave_prob(f2, false)));
            add(code, f2, stay);
        }
        return;
    }

    // Positive: reward regions decide both the drift direction and the
    // bad-reward exit bonus; the drift applies with probability eta.
    const int f2 = std::min(s.fatigue + 1, cfg.fatigue_levels - 1);
    const int topic = s.item_topic;
    auto shifted = [&](int delta) {
        std::vector<int> ints = s.interests;
        ints[topic] = std::clamp(ints[topic] + delta, 0, cfg.interest_levels - 1);
        return interest_code(ints);
    };
    const int code_up = shifted(+1);
    const int code_down = shifted(-1);
    const double eta = cfg.interest_drift_rate;

    struct Region {
        double prob;
        bool up;
        bool bad;
    };
    std::vector<Region> regions;
    if (sigma == 0.0) {
        const double r = std::clamp(mu, cfg.r_min, cfg.r_max);
        regions.push_back({1.0, r > cfg.drift_baseline, r < 0.0});
    } else {
        const double c_lo = std::min(cfg.drift_baseline, 0.0);
        const double c_hi = std::max(cfg.drift_baseline, 0.0);
        const double s_hi = prob_above(mu, sigma, cfg.r_min, cfg.r_max, c_hi);
        const double s_lo = prob_above(mu, sigma, cfg.r_min, cfg.r_max, c_lo);
        regions.push_back({s_hi, true, false});
        if (c_hi > c_lo)
            regions.push_back({s_lo - s_hi, cfg.drift_baseline <= c_lo, c_hi <= 0.0});
        regions.push_back({1.0 - s_lo, false, true});
    }
    for (const auto& reg : regions) {
        if (reg.prob <= 0.0) continue;
        const double cont = reg.prob * (1.0 - leave_prob(f2, reg.bad));
        const int moved = reg.up ? code_up : code_down;
        add(moved, f2, cont * eta);
        add(code, f2, cont * (1.0 - eta));
    }
}

SynthEnv build_env(const EnvConfig& cfg, uint64_t seed) {
    validate(cfg);
    SynthEnv env;
    env.cfg = cfg;
    env.config_hash = env_config_hash(cfg);
    SeededRng rng = SeededRng(seed).child("catalog");
    const int n_cb = static_cast<int>(
        std::llround(cfg.clickbait_fraction * static_cast<double>(cfg.n_items)));
    const int e = cfg.topics + 1;
    env.catalog.reserve(cfg.n_items);
    for (int i = 0; i < cfg.n_items; ++i) {
        mdp::Item item;
        item.id = i;
        item.topic = i % cfg.topics;
        item.clickbait = i < n_cb;
        item.embedding.assign(e, 0.0);
        item.embedding[item.topic] = 1.0;
        item.embedding[cfg.topics] = item.clickbait ? 1.0 : 0.0;
        for (int d = 0; d < e; ++d)
            item.embedding[d] += cfg.embedding_noise_std * rng.normal();
        env.catalog.push_back(std::move(item));
    }
    env.item_marginal_.assign(static_cast<std::size_t>(cfg.topics) * 2, 0.0);
    for (const auto& item : env.catalog)
        env.item_marginal_[item.topic * 2 + (item.clickbait ? 1 : 0)] +=
            1.0 / cfg.n_items;
    return env;
}

StepOutcome env_step(const SynthEnv& env, const LatentUserState& s,
                     const mdp::Item& item, Action a, SeededRng& rng) {
    const auto& cfg = env.cfg;
    LatentUserState cur = s;
    cur.item_topic = item.topic;
    cur.item_clickbait = item.clickbait;

    const double mu = env.reward_mean(cur, a);
    const double sigma = env.reward_std(cur, a);
    const double draw = sigma == 0.0 ? mu : rng.normal(mu, sigma);
    const double reward = std::clamp(draw, cfg.r_min, cfg.r_max);

    StepOutcome out;
    out.reward = reward;
    out.next = cur;
    if (a == Action::Positive) {
        const int dir = reward > cfg.drift_baseline ? 1 : -1;
        const bool apply = rng.uniform() < cfg.interest_drift_rate;
        if (apply) {
            int& lvl = out.next.interests[cur.item_topic];
            lvl = std::clamp(lvl + dir, 0, cfg.interest_levels - 1);
        }
        out.next.fatigue = std::min(cur.fatigue + 1, cfg.fatigue_levels - 1);
    } else {
        const bool inc = rng.uniform() < cfg.negative_fatigue_prob;
        if (inc) out.next.fatigue = std::min(cur.fatigue + 1, cfg.fatigue_levels - 1);
    }
    const double leave_p =
        std::min(1.0, cfg.leave_base +
                          cfg.leave_fatigue * norm_bucket(out.next.fatigue,
                                                          cfg.fatigue_levels) +
                          (reward < 0.0 ? cfg.leave_bad_reward : 0.0));
    out.left = rng.uniform() < leave_p;
    return out;
}

std::pair<double, double> true_reward_lookup(const SynthEnv& env,
                                             const LatentUserState& s,
                                             Action a) {
    return {env.reward_mean(s, a), env.reward_std(s, a)};
}

}  // namespace mtrec::synth
