#pragma once

#include "mtrec/cli/config.hpp"
#include "mtrec/synth/rollout.hpp"

namespace mtrec::cli {

// Command implementations behind the CLI. Each is a pure function of the
// config, input files, and seed: re-runs produce byte-identical artifacts.
// Errors surface as exceptions; the binary maps them to exit codes
// (1 usage/config, 2 numeric failure, 3 I/O).

void run_gen(const RunConfig& cfg);
void run_train_irl(const RunConfig& cfg, irl::Mode mode);
void run_annotate(const RunConfig& cfg, irl::Mode mode);
void run_train_rec(const RunConfig& cfg, double kappa, irl::Mode mode);
void run_train_rl(const RunConfig& cfg, double kappa, irl::Mode mode);
void run_eval(const RunConfig& cfg);
void run_report(const RunConfig& cfg);

// Oracle sidecar written by gen: expert tables plus the latent state id of
// every generated step, for evaluation only.
struct Oracle {
    std::string env_config_hash;
    synth::ExpertTables tables;
    std::vector<std::vector<int>> latent_ids;
};
void save_oracle(const std::string& path, const std::string& env_config_hash,
                 const synth::ExpertTables& tables,
                 const std::vector<std::vector<int>>& latent_ids);
Oracle load_oracle(const std::string& path);

// Artifact paths inside the run directory.
std::string dataset_path(const RunConfig& cfg);
std::string oracle_path(const RunConfig& cfg);
std::string qnet_path(const RunConfig& cfg, irl::Mode mode);
std::string annotated_path(const RunConfig& cfg, irl::Mode mode);
std::string rec_path(const RunConfig& cfg, double kappa);
std::string policy_path(const RunConfig& cfg, double kappa);
std::string metrics_path(const RunConfig& cfg);

}  // namespace mtrec::cli
