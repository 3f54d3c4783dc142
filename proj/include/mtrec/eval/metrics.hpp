#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtrec/align/rec.hpp"
#include "mtrec/mdp/types.hpp"

namespace mtrec::eval {

// Rank-based (Mann-Whitney) AUC; ties contribute 0.5. Requires at least one
// positive and one negative label.
double auc(std::span<const double> scores, std::span<const int> labels);

enum class NcisMode { likelihood, ctr };
std::string ncis_mode_name(NcisMode m);
NcisMode ncis_mode_from_name(const std::string& name);

struct NcisReport {
    std::vector<double> rho;      // per-user trajectory probabilities
    std::vector<double> lengths;  // L_i
    double j_score = 0.0;
    int capped_count = 0;
    double cap = 1.0;
    NcisMode mode = NcisMode::likelihood;
    uint64_t set_fingerprint = 0;
};

// J = sum(min(rho_i, cap) * L_i) / sum(min(rho_i, cap)). In likelihood mode
// p_t is the model's probability of the observed action; in ctr mode p_t is
// the click probability as printed.
NcisReport ncis(const FeedForwardNet& rec, const mdp::Dataset& trajectories,
                double cap, NcisMode mode, const mdp::FeaturizerConfig& fcfg,
                Exec exec = Exec::parallel);

// trained.j_score - untrained.j_score; both reports must cover the same
// trajectory set.
double ncis_adjusted(const NcisReport& trained, const NcisReport& untrained);

// Episodic click-through rate: clicks / (page_size * steps).
double ectr(long long total_clicks, long long n_steps, int page_size);

// Rank correlation with average ranks on ties.
double spearman(std::span<const double> x, std::span<const double> y);

// q-quantile of the bootstrap distribution of mean(x) - mean(y).
double bootstrap_diff_quantile(std::span<const double> x,
                               std::span<const double> y, double q, int n_boot,
                               uint64_t seed);

}  // namespace mtrec::eval
