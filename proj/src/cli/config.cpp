#include "mtrec/cli/config.hpp"

#include <fstream>
#include <set>

#include "mtrec/common.hpp"

namespace mtrec::cli {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw config_error(where + ": unknown key '" + it.key() + "'");
}

}  // namespace

std::string RunConfig::run_dir() const { return io.workdir + "/" + io.run_id; }

RunConfig config_from_json(const nlohmann::json& j, const std::string& origin) {
    if (!j.is_object()) throw config_error(origin + ": config must be an object");
    reject_unknown(j, {"seed", "env", "features", "irl", "align", "eval", "io"},
                   origin);
    RunConfig cfg;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();

    if (j.contains("env")) {
        cfg.has_env = true;
        cfg.env = synth::env_config_from_json(j.at("env"), origin + ": env");
    }
    if (j.contains("features")) {
        const auto& f = j.at("features");
        reject_unknown(f, {"window", "flags", "step_norm"}, origin + ": features");
        cfg.features.window = f.value("window", cfg.features.window);
        cfg.features.flags = f.value("flags", cfg.features.flags);
        cfg.features.step_norm = f.value("step_norm", cfg.features.step_norm);
    }
    if (j.contains("irl")) {
        const auto& i = j.at("irl");
        reject_unknown(i,
                       {"gamma", "alpha", "n_quantiles", "learning_rate",
                        "batch_size", "iterations", "include_gamma_in_u2",
                        "hidden"},
                       origin + ": irl");
        cfg.irl.gamma = i.value("gamma", cfg.irl.gamma);
        cfg.irl.alpha = i.value("alpha", cfg.irl.alpha);
        cfg.irl.n_quantiles = i.value("n_quantiles", cfg.irl.n_quantiles);
        cfg.irl.learning_rate = i.value("learning_rate", cfg.irl.learning_rate);
        cfg.irl.batch_size = i.value("batch_size", cfg.irl.batch_size);
        cfg.irl.iterations = i.value("iterations", cfg.irl.iterations);
        cfg.irl.include_gamma_in_u2 =
            i.value("include_gamma_in_u2", cfg.irl.include_gamma_in_u2);
        if (i.contains("hidden"))
            cfg.irl.hidden = i.at("hidden").get<std::vector<int>>();
        cfg.irl.validate();
    }
    if (j.contains("align")) {
        const auto& a = j.at("align");
        reject_unknown(a,
                       {"kappa", "rl_kappa", "learning_rate", "batch_size",
                        "epochs", "hidden", "policy_iterations",
                        "policy_episodes", "policy_learning_rate"},
                       origin + ": align");
        cfg.align.kappa = a.value("kappa", cfg.align.kappa);
        cfg.align.rl_kappa = a.value("rl_kappa", cfg.align.rl_kappa);
        cfg.align.learning_rate = a.value("learning_rate", cfg.align.learning_rate);
        cfg.align.batch_size = a.value("batch_size", cfg.align.batch_size);
        cfg.align.epochs = a.value("epochs", cfg.align.epochs);
        if (a.contains("hidden"))
            cfg.align.hidden = a.at("hidden").get<std::vector<int>>();
        cfg.align.policy_iterations =
            a.value("policy_iterations", cfg.align.policy_iterations);
        cfg.align.policy_episodes =
            a.value("policy_episodes", cfg.align.policy_episodes);
        cfg.align.policy_learning_rate =
            a.value("policy_learning_rate", cfg.align.policy_learning_rate);
        cfg.align.validate();
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        reject_unknown(e,
                       {"ncis_mode", "cap", "bins", "steps", "train_frac",
                        "ncis_frac", "eval_episodes"},
                       origin + ": eval");
        if (e.contains("ncis_mode"))
            cfg.eval.ncis_mode =
                eval::ncis_mode_from_name(e.at("ncis_mode").get<std::string>());
        cfg.eval.cap = e.value("cap", cfg.eval.cap);
        cfg.eval.bins = e.value("bins", cfg.eval.bins);
        cfg.eval.steps = e.value("steps", cfg.eval.steps);
        cfg.eval.train_frac = e.value("train_frac", cfg.eval.train_frac);
        cfg.eval.ncis_frac = e.value("ncis_frac", cfg.eval.ncis_frac);
        cfg.eval.eval_episodes = e.value("eval_episodes", cfg.eval.eval_episodes);
    }
    if (j.contains("io")) {
        const auto& io = j.at("io");
        reject_unknown(io, {"workdir", "run_id", "exec"}, origin + ": io");
        cfg.io.workdir = io.value("workdir", cfg.io.workdir);
        cfg.io.run_id = io.value("run_id", cfg.io.run_id);
        if (io.contains("exec")) {
            const auto name = io.at("exec").get<std::string>();
            if (name == "serial")
                cfg.io.exec = Exec::serial;
            else if (name == "parallel")
                cfg.io.exec = Exec::parallel;
            else
                throw config_error(origin + ": io.exec must be serial|parallel");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(path + ": " + e.what());
    }
    return config_from_json(j, path);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["env"] = synth::env_config_to_json(cfg.env);
    j["features"] = {{"window", cfg.features.window},
                     {"flags", cfg.features.flags},
                     {"step_norm", cfg.features.step_norm}};
    j["irl"] = {{"gamma", cfg.irl.gamma},
                {"alpha", cfg.irl.alpha},
                {"n_quantiles", cfg.irl.n_quantiles},
                {"learning_rate", cfg.irl.learning_rate},
                {"batch_size", cfg.irl.batch_size},
                {"iterations", cfg.irl.iterations},
                {"include_gamma_in_u2", cfg.irl.include_gamma_in_u2},
                {"hidden", cfg.irl.hidden}};
    j["align"] = {{"kappa", cfg.align.kappa},
                  {"rl_kappa", cfg.align.rl_kappa},
                  {"learning_rate", cfg.align.learning_rate},
                  {"batch_size", cfg.align.batch_size},
                  {"epochs", cfg.align.epochs},
                  {"hidden", cfg.align.hidden},
                  {"policy_iterations", cfg.align.policy_iterations},
                  {"policy_episodes", cfg.align.policy_episodes},
                  {"policy_learning_rate", cfg.align.policy_learning_rate}};
    j["eval"] = {{"ncis_mode", eval::ncis_mode_name(cfg.eval.ncis_mode)},
                 {"cap", cfg.eval.cap},
                 {"bins", cfg.eval.bins},
                 {"steps", cfg.eval.steps},
                 {"train_frac", cfg.eval.train_frac},
                 {"ncis_frac", cfg.eval.ncis_frac},
                 {"eval_episodes", cfg.eval.eval_episodes}};
    j["io"] = {{"workdir", cfg.io.workdir},
               {"run_id", cfg.io.run_id},
               {"exec", cfg.io.exec == Exec::serial ? "serial" : "parallel"}};
    return j;
}

}  // namespace mtrec::cli
