#pragma once

#include <string>

#include <json.hpp>

#include "mtrec/align/rec.hpp"
#include "mtrec/eval/metrics.hpp"
#include "mtrec/irl/qnet.hpp"
#include "mtrec/synth/env.hpp"

namespace mtrec::cli {

struct EvalSection {
    eval::NcisMode ncis_mode = eval::NcisMode::likelihood;
    double cap = 1.0;
    int bins = 50;
    int steps = 10;  // per-step series length S
    double train_frac = 0.7;
    double ncis_frac = 0.1;
    int eval_episodes = 500;
};

struct IoSection {
    std::string workdir = "runs";
    std::string run_id = "run";
    Exec exec = Exec::parallel;
};

// One JSON config drives the whole pipeline. Sections: env, features, irl,
// align, eval, io, plus the top-level master seed. Unknown keys are
// rejected with their path.
struct RunConfig {
    uint64_t seed = 0;
    bool has_env = false;
    synth::EnvConfig env;
    mdp::FeaturizerConfig features;
    irl::IRLConfig irl;
    align::AlignConfig align;
    EvalSection eval;
    IoSection io;

    std::string run_dir() const;
};

RunConfig config_from_json(const nlohmann::json& j, const std::string& origin);
RunConfig load_config(const std::string& path);
// Fully resolved snapshot (defaults filled in).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace mtrec::cli
