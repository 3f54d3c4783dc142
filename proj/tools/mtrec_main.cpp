#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mtrec/cli/pipeline.hpp"
#include "mtrec/common.hpp"

namespace {

struct Options {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> out;
    std::string mode = "quantile";
    std::optional<double> kappa;
    std::optional<std::string> ncis_mode;
};

mtrec::cli::RunConfig resolve(const Options& opt) {
    mtrec::cli::RunConfig cfg = mtrec::cli::load_config(opt.config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out) cfg.io.workdir = *opt.out;
    if (opt.ncis_mode)
        cfg.eval.ncis_mode = mtrec::eval::ncis_mode_from_name(*opt.ncis_mode);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MTRec: mental-reward model training and recommender alignment"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--config", opt.config_path, "config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", opt.seed, "override the master seed");
    app.add_option("--out", opt.out, "override io.workdir");
    app.add_option("--mode", opt.mode, "IRL mode: scalar|quantile")
        ->check(CLI::IsMember({"scalar", "quantile"}));
    app.add_option("--kappa", opt.kappa, "alignment weight override");
    app.add_option("--ncis-mode", opt.ncis_mode, "NCIS mode: likelihood|ctr")
        ->check(CLI::IsMember({"likelihood", "ctr"}));

    auto* gen = app.add_subcommand("gen", "generate the synthetic expert dataset");
    auto* train_irl =
        app.add_subcommand("train-irl", "train the mental reward model");
    auto* annotate =
        app.add_subcommand("annotate", "patch recovered rewards into the dataset");
    auto* train_rec =
        app.add_subcommand("train-rec", "train the CTR recommender");
    auto* train_rl =
        app.add_subcommand("train-rl", "train the policy-gradient recommender");
    auto* eval_cmd = app.add_subcommand("eval", "compute metrics for saved models");
    auto* report = app.add_subcommand("report", "write the run report and figures");

    CLI11_PARSE(app, argc, argv);

    try {
        const mtrec::cli::RunConfig cfg = resolve(opt);
        const mtrec::irl::Mode mode = mtrec::irl::mode_from_name(opt.mode);
        if (gen->parsed()) {
            mtrec::cli::run_gen(cfg);
        } else if (train_irl->parsed()) {
            mtrec::cli::run_train_irl(cfg, mode);
        } else if (annotate->parsed()) {
            mtrec::cli::run_annotate(cfg, mode);
        } else if (train_rec->parsed()) {
            mtrec::cli::run_train_rec(cfg, opt.kappa.value_or(cfg.align.kappa),
                                      mode);
        } else if (train_rl->parsed()) {
            mtrec::cli::run_train_rl(cfg, opt.kappa.value_or(cfg.align.rl_kappa),
                                     mode);
        } else if (eval_cmd->parsed()) {
            mtrec::cli::run_eval(cfg);
        } else if (report->parsed()) {
            mtrec::cli::run_report(cfg);
        }
    } catch (const mtrec::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 2;
    } catch (const mtrec::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
