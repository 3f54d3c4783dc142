#include "mtrec/cli/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtrec/align/policy.hpp"
#include "mtrec/common.hpp"
#include "mtrec/eval/analysis.hpp"
#include "mtrec/irl/checkpoint.hpp"
#include "mtrec/irl/reward.hpp"
#include "mtrec/irl/train.hpp"
#include "mtrec/mdp/io.hpp"
#include "mtrec/mdp/split.hpp"

namespace mtrec::cli {

namespace fs = std::filesystem;
using mdp::Action;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << text;
    if (!f) throw io_error("write failed: " + path);
}

void ensure_run_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.run_dir(), ec);
    if (ec) throw io_error("cannot create run dir " + cfg.run_dir() + ": " +
                           ec.message());
    write_text(cfg.run_dir() + "/resolved_config.json",
               config_to_json(cfg).dump(2) + "\n");
}

mdp::FeaturizerConfig featurizer_from_extra(const nlohmann::json& extra) {
    mdp::FeaturizerConfig f;
    const auto& j = extra.at("featurizer");
    f.window = j.at("window").get<int>();
    f.flags = j.at("flags").get<int>();
    f.step_norm = j.at("step_norm").get<double>();
    return f;
}

nlohmann::ordered_json featurizer_to_extra(const mdp::FeaturizerConfig& f) {
    return {{"window", f.window}, {"flags", f.flags}, {"step_norm", f.step_norm}};
}

synth::SynthEnv rebuild_env(const RunConfig& cfg) {
    if (!cfg.has_env)
        throw config_error("config: missing required section 'env'");
    return synth::build_env(cfg.env, cfg.seed);
}

struct MetricsWriter {
    std::ostringstream rows;
    const RunConfig& cfg;
    explicit MetricsWriter(const RunConfig& c) : cfg(c) {
        rows << "run_id,metric,split,value,mode,seed\n";
    }
    void add(const std::string& metric, const std::string& split, double value,
             const std::string& mode) {
        rows << cfg.io.run_id << ',' << metric << ',' << split << ','
             << format_double(value) << ',' << mode << ',' << cfg.seed << '\n';
    }
};

std::string kappa_tag(double kappa) { return format_double(kappa); }

std::vector<std::string> sorted_matches(const std::string& dir,
                                        const std::string& prefix,
                                        const std::string& suffix) {
    std::vector<std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > prefix.size() + suffix.size() &&
            name.compare(0, prefix.size(), prefix) == 0 &&
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
            out.push_back(entry.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::string dataset_path(const RunConfig& cfg) {
    return cfg.run_dir() + "/dataset.jsonl";
}
std::string oracle_path(const RunConfig& cfg) {
    return cfg.run_dir() + "/oracle.json";
}
std::string qnet_path(const RunConfig& cfg, irl::Mode mode) {
    return cfg.run_dir() + "/qnet_" + irl::mode_name(mode) + ".ckpt";
}
std::string annotated_path(const RunConfig& cfg, irl::Mode mode) {
    return cfg.run_dir() + "/annotated_" + irl::mode_name(mode) + ".jsonl";
}
std::string rec_path(const RunConfig& cfg, double kappa) {
    return cfg.run_dir() + "/rec_kappa_" + kappa_tag(kappa) + ".ckpt";
}
std::string policy_path(const RunConfig& cfg, double kappa) {
    return cfg.run_dir() + "/policy_kappa_" + kappa_tag(kappa) + ".ckpt";
}
std::string metrics_path(const RunConfig& cfg) {
    return cfg.run_dir() + "/metrics.csv";
}

void save_oracle(const std::string& path, const std::string& env_config_hash,
                 const synth::ExpertTables& tables,
                 const std::vector<std::vector<int>>& latent_ids) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["env_config_hash"] = env_config_hash;
    j["gamma"] = tables.gamma;
    j["temperature"] = tables.temperature;
    j["n_latent"] = tables.v.size();
    j["q"] = tables.q;
    j["v"] = tables.v;
    j["r_dec"] = tables.r_dec;
    j["r_true_mean"] = tables.r_true_mean;
    j["r_true_std"] = tables.r_true_std;
    j["latents"] = latent_ids;
    write_text(path, j.dump() + "\n");
}

Oracle load_oracle(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open oracle: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw io_error("oracle parse error in " + path + ": " + e.what());
    }
    if (j.value("schema_version", -1) != 1)
        throw io_error("unsupported oracle schema_version in " + path);
    Oracle o;
    o.env_config_hash = j.value("env_config_hash", std::string{});
    o.tables.gamma = j.at("gamma").get<double>();
    o.tables.temperature = j.at("temperature").get<double>();
    o.tables.q = j.at("q").get<std::vector<double>>();
    o.tables.v = j.at("v").get<std::vector<double>>();
    o.tables.r_dec = j.at("r_dec").get<std::vector<double>>();
    o.tables.r_true_mean = j.at("r_true_mean").get<std::vector<double>>();
    o.tables.r_true_std = j.at("r_true_std").get<std::vector<double>>();
    o.latent_ids = j.at("latents").get<std::vector<std::vector<int>>>();
    return o;
}

void run_gen(const RunConfig& cfg) {
    if (!cfg.has_env)
        throw config_error("config: missing required section 'env'");
    if (cfg.env.n_users < 1)
        throw std::invalid_argument("env.n_users must be >= 1");
    ensure_run_dir(cfg);
    const synth::SynthEnv env = rebuild_env(cfg);
    const synth::ExpertTables tables =
        synth::soft_value_iteration(env, cfg.env.gamma, 1e-9, 100000, cfg.io.exec);
    synth::GenResult gen = synth::generate_trajectories(
        env, tables, cfg.env.n_users, cfg.env.episode_len, cfg.seed, cfg.io.exec);
    mdp::write_dataset(gen.dataset, dataset_path(cfg));
    save_oracle(oracle_path(cfg), env.config_hash, tables, gen.latent_ids);
}

void run_train_irl(const RunConfig& cfg, irl::Mode mode) {
    ensure_run_dir(cfg);
    const mdp::Dataset data = mdp::read_dataset(dataset_path(cfg));
    irl::TrainIrlResult result =
        irl::train_irl(data, cfg.irl, mode, cfg.features, cfg.seed, cfg.io.exec);

    nlohmann::ordered_json extra;
    extra["mode"] = irl::mode_name(mode);
    extra["gamma"] = cfg.irl.gamma;
    extra["alpha"] = cfg.irl.alpha;
    extra["n_quantiles"] = result.qnet.n_quantiles();
    extra["include_gamma_in_u2"] = cfg.irl.include_gamma_in_u2;
    extra["quantile_levels"] = result.qnet.levels();
    extra["featurizer"] = featurizer_to_extra(cfg.features);
    extra["embedding_dim"] = data.meta.embedding_dim;
    extra["feat_hash"] = to_hex(mdp::featurizer_hash(
        cfg.features, data.meta.embedding_dim, data.meta.env_config_hash));
    extra["env_config_hash"] = data.meta.env_config_hash;
    extra["seed"] = cfg.seed;
    irl::save_model(qnet_path(cfg, mode), "qnet", result.qnet.net(), extra);

    std::ostringstream csv;
    csv << "iteration,loss\n";
    for (const auto& [it, loss] : result.loss_curve)
        csv << it << ',' << format_double(loss) << '\n';
    write_text(cfg.run_dir() + "/loss_irl_" + irl::mode_name(mode) + ".csv",
               csv.str());
}

namespace {

struct LoadedQnet {
    irl::QuantileQNetwork qnet;
    mdp::FeaturizerConfig fcfg;
    double gamma = 0.0;
};

LoadedQnet load_qnet_checked(const std::string& path, const mdp::Dataset& data) {
    irl::LoadedModel loaded = irl::load_model(path);
    if (loaded.kind != "qnet")
        throw std::invalid_argument(path + ": checkpoint kind '" + loaded.kind +
                                    "' is not a qnet");
    LoadedQnet out;
    out.fcfg = featurizer_from_extra(loaded.extra);
    out.gamma = loaded.extra.at("gamma").get<double>();
    const std::string ckpt_hash = loaded.extra.at("feat_hash").get<std::string>();
    const std::string data_hash = to_hex(mdp::featurizer_hash(
        out.fcfg, data.meta.embedding_dim, data.meta.env_config_hash));
    if (ckpt_hash != data_hash)
        throw std::invalid_argument(
            "featurizer hash mismatch: checkpoint " + ckpt_hash + " vs dataset " +
            data_hash + "; refusing to annotate");
    out.qnet = irl::QuantileQNetwork::wrap(
        std::move(loaded.net), loaded.extra.at("n_quantiles").get<int>());
    return out;
}

}  // namespace

void run_annotate(const RunConfig& cfg, irl::Mode mode) {
    ensure_run_dir(cfg);
    const mdp::Dataset data = mdp::read_dataset(dataset_path(cfg));
    LoadedQnet lq = load_qnet_checked(qnet_path(cfg, mode), data);
    const mdp::Dataset annotated =
        irl::annotate_dataset(data, lq.qnet, lq.fcfg, lq.gamma, cfg.io.exec);
    mdp::write_dataset(annotated, annotated_path(cfg, mode));
}

void run_train_rec(const RunConfig& cfg, double kappa, irl::Mode mode) {
    ensure_run_dir(cfg);
    const std::string src =
        kappa > 0.0 ? annotated_path(cfg, mode) : dataset_path(cfg);
    const mdp::Dataset data = mdp::read_dataset(src);
    mdp::DatasetSplits splits = mdp::split_dataset(
        data, cfg.eval.train_frac, cfg.eval.ncis_frac, cfg.seed);
    align::TrainRecResult result = align::train_rec(
        splits.train, cfg.align, kappa, cfg.features, cfg.seed, cfg.io.exec);

    nlohmann::ordered_json extra;
    extra["kappa"] = kappa;
    extra["irl_mode"] = irl::mode_name(mode);
    extra["featurizer"] = featurizer_to_extra(cfg.features);
    extra["embedding_dim"] = data.meta.embedding_dim;
    extra["feat_hash"] = to_hex(mdp::featurizer_hash(
        cfg.features, data.meta.embedding_dim, data.meta.env_config_hash));
    extra["seed"] = cfg.seed;
    irl::save_model(rec_path(cfg, kappa), "rec", result.net, extra);

    std::ostringstream csv;
    csv << "epoch,ce,align,final\n";
    for (const auto& e : result.epochs)
        csv << e.epoch << ',' << format_double(e.ce) << ','
            << format_double(e.align) << ',' << format_double(e.final) << '\n';
    write_text(cfg.run_dir() + "/rec_epochs_kappa_" + kappa_tag(kappa) + ".csv",
               csv.str());
}

void run_train_rl(const RunConfig& cfg, double kappa, irl::Mode mode) {
    ensure_run_dir(cfg);
    const synth::SynthEnv env = rebuild_env(cfg);
    const synth::ExpertTables tables =
        synth::soft_value_iteration(env, cfg.env.gamma, 1e-9, 100000, cfg.io.exec);

    LoadedQnet lq;
    const irl::QuantileQNetwork* qnet_ptr = nullptr;
    if (kappa > 0.0) {
        const mdp::Dataset data = mdp::read_dataset(dataset_path(cfg));
        lq = load_qnet_checked(qnet_path(cfg, mode), data);
        qnet_ptr = &lq.qnet;
    }
    align::PolicyTrainResult result = align::train_policy(
        env, tables, qnet_ptr, kappa, lq.gamma, cfg.align, cfg.features, cfg.seed,
        cfg.io.exec);

    nlohmann::ordered_json extra;
    extra["kappa"] = kappa;
    extra["irl_mode"] = irl::mode_name(mode);
    extra["featurizer"] = featurizer_to_extra(cfg.features);
    extra["n_items"] = env.catalog.size();
    extra["seed"] = cfg.seed;
    irl::save_model(policy_path(cfg, kappa), "policy", result.net, extra);

    std::ostringstream csv;
    csv << "iteration,mean_return\n";
    for (std::size_t i = 0; i < result.mean_return.size(); ++i)
        csv << i << ',' << format_double(result.mean_return[i]) << '\n';
    write_text(cfg.run_dir() + "/policy_returns_kappa_" + kappa_tag(kappa) +
                   ".csv",
               csv.str());
}

void run_eval(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    const std::string dir = cfg.run_dir();
    const auto rec_ckpts = sorted_matches(dir, "rec_kappa_", ".ckpt");
    const auto policy_ckpts = sorted_matches(dir, "policy_kappa_", ".ckpt");
    const auto qnet_ckpts = sorted_matches(dir, "qnet_", ".ckpt");
    if (rec_ckpts.empty() && policy_ckpts.empty() && qnet_ckpts.empty())
        throw std::invalid_argument("eval: no model checkpoints in " + dir);

    const mdp::Dataset data = mdp::read_dataset(dataset_path(cfg));
    MetricsWriter mw(cfg);

    // Recommender checkpoints: ranking and off-policy metrics plus simulated
    // episodes against the oracle environment.
    if (!rec_ckpts.empty()) {
        mdp::DatasetSplits splits = mdp::split_dataset(
            data, cfg.eval.train_frac, cfg.eval.ncis_frac, cfg.seed);
        const synth::SynthEnv env = rebuild_env(cfg);
        if (env.config_hash != data.meta.env_config_hash)
            throw std::invalid_argument(
                "eval: config env hash does not match the dataset");
        const synth::ExpertTables tables = synth::soft_value_iteration(
            env, cfg.env.gamma, 1e-9, 100000, cfg.io.exec);

        const align::RecBatch test_batch =
            align::build_rec_batch(splits.test, cfg.features);
        for (const auto& path : rec_ckpts) {
            irl::LoadedModel loaded = irl::load_model(path);
            if (loaded.kind != "rec")
                throw std::invalid_argument(path + ": not a rec checkpoint");
            const double kappa = loaded.extra.at("kappa").get<double>();
            const std::string tag = "kappa=" + kappa_tag(kappa);

            std::vector<double> scores(test_batch.n);
            std::vector<int> labels(test_batch.n);
            for_items(test_batch.n, cfg.io.exec, [&](std::size_t i) {
                scores[i] = align::clamp_prob(
                    loaded.net.forward({test_batch.x.data() + i * test_batch.dim,
                                        static_cast<std::size_t>(test_batch.dim)})[0]);
                labels[i] = test_batch.label[i] > 0.5 ? 1 : 0;
            });
            mw.add("auc", "test", eval::auc(scores, labels), tag);

            const eval::NcisReport trained =
                eval::ncis(loaded.net, splits.ncis, cfg.eval.cap,
                           cfg.eval.ncis_mode, cfg.features, cfg.io.exec);
            SeededRng untrained_rng = SeededRng(cfg.seed).child("rec_init");
            const FeedForwardNet untrained_net = align::make_rec_net(
                test_batch.dim, cfg.align.hidden, untrained_rng);
            const eval::NcisReport untrained =
                eval::ncis(untrained_net, splits.ncis, cfg.eval.cap,
                           cfg.eval.ncis_mode, cfg.features, cfg.io.exec);
            const std::string ncis_tag =
                tag + ";" + eval::ncis_mode_name(cfg.eval.ncis_mode);
            mw.add("ncis", "ncis", trained.j_score, ncis_tag);
            mw.add("ncis_untrained", "ncis", untrained.j_score, ncis_tag);
            mw.add("ncis_adjusted", "ncis", eval::ncis_adjusted(trained, untrained),
                   ncis_tag);

            const auto episodes = align::evaluate_recommender(
                env, tables, loaded.net, cfg.features, cfg.eval.eval_episodes,
                cfg.seed, cfg.io.exec);
            double true_sum = 0.0;
            long long clicks = 0, steps = 0;
            for (const auto& ep : episodes) {
                true_sum += ep.true_reward_sum;
                clicks += ep.clicks;
                steps += ep.steps;
            }
            mw.add("true_reward_per_episode", "episodes",
                   true_sum / episodes.size(), tag);
            mw.add("ectr", "episodes", eval::ectr(clicks, steps, 1), tag);
        }
    }

    // Mental-reward checkpoints: oracle agreement and reward-rank recovery.
    for (const auto& path : qnet_ckpts) {
        irl::LoadedModel loaded = irl::load_model(path);
        if (loaded.kind != "qnet") continue;
        const std::string tag = loaded.extra.at("mode").get<std::string>();
        LoadedQnet lq = load_qnet_checked(path, data);
        const Oracle oracle = load_oracle(oracle_path(cfg));
        mw.add("policy_agreement", "train",
               eval::policy_agreement(lq.qnet, oracle.tables, rebuild_env(cfg),
                                      data, oracle.latent_ids, lq.fcfg,
                                      cfg.io.exec),
               tag);
        const irl::Mode m = irl::mode_from_name(tag);
        if (fs::exists(annotated_path(cfg, m))) {
            const mdp::Dataset annotated =
                mdp::read_dataset(annotated_path(cfg, m));
            const eval::RewardPairs pairs = eval::collect_reward_pairs(
                annotated, oracle.tables, oracle.latent_ids);
            mw.add("spearman_reward", "train",
                   eval::spearman(pairs.recovered, pairs.truth), tag);
        }
    }

    // Policy checkpoints: simulated interaction quality.
    if (!policy_ckpts.empty()) {
        const synth::SynthEnv env = rebuild_env(cfg);
        const synth::ExpertTables tables = synth::soft_value_iteration(
            env, cfg.env.gamma, 1e-9, 100000, cfg.io.exec);
        for (const auto& path : policy_ckpts) {
            irl::LoadedModel loaded = irl::load_model(path);
            if (loaded.kind != "policy")
                throw std::invalid_argument(path + ": not a policy checkpoint");
            const double kappa = loaded.extra.at("kappa").get<double>();
            const std::string tag = "kappa=" + kappa_tag(kappa);
            const auto episodes = align::evaluate_policy(
                env, tables, loaded.net, cfg.features, cfg.eval.eval_episodes,
                cfg.seed, cfg.io.exec);
            double true_sum = 0.0;
            long long clicks = 0, steps = 0;
            for (const auto& ep : episodes) {
                true_sum += ep.true_reward_sum;
                clicks += ep.clicks;
                steps += ep.steps;
            }
            mw.add("true_reward_per_episode", "rl_episodes",
                   true_sum / episodes.size(), tag);
            mw.add("ectr", "rl_episodes", eval::ectr(clicks, steps, 1), tag);
        }
    }

    write_text(metrics_path(cfg), mw.rows.str());
}

void run_report(const RunConfig& cfg) {
    ensure_run_dir(cfg);
    std::string annotated_file = annotated_path(cfg, irl::Mode::quantile);
    if (!fs::exists(annotated_file)) {
        const std::string fallback = annotated_path(cfg, irl::Mode::scalar);
        if (!fs::exists(fallback))
            throw io_error("report: missing input " + annotated_file);
        annotated_file = fallback;
    }
    const mdp::Dataset annotated = mdp::read_dataset(annotated_file);

    const eval::StepMeanSeries series =
        eval::reward_by_step(annotated, cfg.eval.steps);
    std::ostringstream by_step;
    by_step << "run_id,step,mean_reward,n\n";
    for (int t = 0; t < cfg.eval.steps; ++t)
        by_step << cfg.io.run_id << ',' << t << ','
                << format_double(series.mean[t]) << ',' << series.n[t] << '\n';
    write_text(cfg.run_dir() + "/by_step.csv", by_step.str());

    const eval::RewardAnalysis analysis =
        eval::conditional_reward_hists(annotated, cfg.eval.bins);
    std::ostringstream hists;
    hists << "run_id,condition,bin_left,bin_right,count\n";
    for (int c = 0; c < 4; ++c) {
        const auto& h = analysis.hists[c];
        for (std::size_t b = 0; b < h.count.size(); ++b)
            hists << cfg.io.run_id << ',' << eval::kRewardConditionNames[c] << ','
                  << format_double(h.bin_left[b]) << ','
                  << format_double(h.bin_right[b]) << ',' << h.count[b] << '\n';
    }
    write_text(cfg.run_dir() + "/hists.csv", hists.str());

    std::ostringstream md;
    md << "# Run report: " << cfg.io.run_id << "\n\n";
    md << "- seed: " << cfg.seed << "\n";
    md << "- annotated dataset: " << annotated_file << "\n";
    md << "- trajectories: " << annotated.trajectories.size() << "\n";
    md << "- steps: " << annotated.step_count() << "\n\n";
    md << "## Recovered reward by step (first " << cfg.eval.steps << ")\n\n";
    md << "| step | mean recovered reward | n |\n|---|---|---|\n";
    for (int t = 0; t < cfg.eval.steps; ++t)
        md << "| " << t << " | " << format_double(series.mean[t]) << " | "
           << series.n[t] << " |\n";
    md << "\n## Conditional reward samples\n\n";
    md << "| condition | n |\n|---|---|\n";
    for (int c = 0; c < 4; ++c)
        md << "| " << eval::kRewardConditionNames[c] << " | "
           << analysis.samples[c].size() << " |\n";
    if (fs::exists(metrics_path(cfg))) {
        std::ifstream mf(metrics_path(cfg));
        std::string line;
        md << "\n## Metrics\n\n";
        bool header = true;
        while (std::getline(mf, line)) {
            std::string row = line;
            for (auto& ch : row)
                if (ch == ',') ch = '|';
            md << "| " << row << " |\n";
            if (header) {
                md << "|---|---|---|---|---|---|\n";
                header = false;
            }
        }
    }
    write_text(cfg.run_dir() + "/report.md", md.str());
}

}  // namespace mtrec::cli
