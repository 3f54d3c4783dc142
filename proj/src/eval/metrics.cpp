#include "mtrec/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mtrec/common.hpp"
#include "mtrec/numerics/reductions.hpp"
#include "mtrec/numerics/rng.hpp"

namespace mtrec::eval {

namespace {

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("correlation undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("auc: length mismatch");
    std::size_t n_pos = 0, n_neg = 0;
    for (int l : labels) (l != 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc: needs both classes");
    const std::vector<double> ranks = average_ranks(scores);
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != 0) rank_sum_pos += ranks[i];
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

std::string ncis_mode_name(NcisMode m) {
    return m == NcisMode::likelihood ? "likelihood" : "ctr";
}

NcisMode ncis_mode_from_name(const std::string& name) {
    if (name == "likelihood") return NcisMode::likelihood;
    if (name == "ctr") return NcisMode::ctr;
    throw config_error("unknown ncis mode '" + name + "' (likelihood|ctr)");
}

NcisReport ncis(const FeedForwardNet& rec, const mdp::Dataset& trajectories,
                double cap, NcisMode mode, const mdp::FeaturizerConfig& fcfg,
                Exec exec) {
    if (trajectories.trajectories.empty())
        throw std::invalid_argument("ncis: empty trajectory set");
    if (!(cap > 0.0)) throw std::invalid_argument("ncis: cap must be positive");

    const std::size_t n = trajectories.trajectories.size();
    NcisReport report;
    report.cap = cap;
    report.mode = mode;
    report.rho.assign(n, 0.0);
    report.lengths.assign(n, 0.0);

    for_items(n, exec, [&](std::size_t ti) {
        const auto& traj = trajectories.trajectories[ti];
        double rho = 1.0;
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const auto& step = traj.steps[t];
            std::span<const mdp::InteractionStep> hist(traj.steps.data(), t);
            const double f = align::score(rec, hist,
                                          trajectories.item(step.item_id),
                                          trajectories, fcfg);
            const double p =
                mode == NcisMode::ctr
                    ? f
                    : (step.action == mdp::Action::Positive ? f : 1.0 - f);
            rho *= p;
        }
        report.rho[ti] = rho;
        report.lengths[ti] = static_cast<double>(traj.steps.size());
    });

    std::vector<double> weighted(n), capped(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::min(report.rho[i], cap);
        if (report.rho[i] > cap) ++report.capped_count;
        capped[i] = w;
        weighted[i] = w * report.lengths[i];
    }
    const double denom = pairwise_sum(capped);
    if (denom <= 0.0)
        throw numeric_error("ncis: degenerate weights (all zero)");
    report.j_score = pairwise_sum(weighted) / denom;

    uint64_t h = 14695981039346656037ULL;
    for (const auto& traj : trajectories.trajectories) {
        h = fnv1a64(&traj.user_id, sizeof(traj.user_id), h);
        const auto len = traj.steps.size();
        h = fnv1a64(&len, sizeof(len), h);
    }
    report.set_fingerprint = h;
    return report;
}

double ncis_adjusted(const NcisReport& trained, const NcisReport& untrained) {
    if (trained.set_fingerprint != untrained.set_fingerprint)
        throw std::invalid_argument(
            "ncis_adjusted: reports cover different trajectory sets");
    return trained.j_score - untrained.j_score;
}

double ectr(long long total_clicks, long long n_steps, int page_size) {
    if (n_steps < 1) throw std::invalid_argument("ectr: n_steps must be >= 1");
    if (page_size < 1) throw std::invalid_argument("ectr: page_size must be >= 1");
    return static_cast<double>(total_clicks) /
           (static_cast<double>(page_size) * static_cast<double>(n_steps));
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("spearman: needs >= 2 points");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

double bootstrap_diff_quantile(std::span<const double> x,
                               std::span<const double> y, double q, int n_boot,
                               uint64_t seed) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("bootstrap: empty sample");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("bootstrap: quantile must be in (0,1)");
    SeededRng rng = SeededRng(seed).child("bootstrap");
    std::vector<double> diffs(n_boot);
    for (int b = 0; b < n_boot; ++b) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            sx += x[rng.uniform_int(static_cast<int>(x.size()))];
        for (std::size_t i = 0; i < y.size(); ++i)
            sy += y[rng.uniform_int(static_cast<int>(y.size()))];
        diffs[b] = sx / static_cast<double>(x.size()) -
                   sy / static_cast<double>(y.size());
    }
    std::sort(diffs.begin(), diffs.end());
    const double pos = q * (n_boot - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min<std::size_t>(lo + 1, n_boot - 1);
    const double frac = pos - static_cast<double>(lo);
    return diffs[lo] * (1.0 - frac) + diffs[hi] * frac;
}

}  // namespace mtrec::eval
