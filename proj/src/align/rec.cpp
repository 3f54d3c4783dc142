#include "mtrec/align/rec.hpp"

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/numerics/adam.hpp"

namespace mtrec::align {

using mdp::Action;

namespace {

constexpr double kProbEps = 1e-7;

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> ix(n);
    for (std::size_t i = 0; i < n; ++i) ix[i] = i;
    return ix;
}

void require_annotation(const RecBatch& batch, std::size_t row) {
    if (!batch.annotated[row]) {
        const auto& r = batch.ref[row];
        throw std::invalid_argument(
            "align_loss: step without annotation (user " + std::to_string(r[0]) +
            ", traj " + std::to_string(r[1]) + ", t " + std::to_string(r[2]) + ")");
    }
}

// Gradient driver over the selected rows; per_sample sees the original row
// index.
template <typename PerSample>
double subset_loss(const FeedForwardNet& rec, const RecBatch& batch,
                   std::span<const std::size_t> indices, Exec mode,
                   std::vector<double>* grad, const PerSample& per_sample) {
    const std::size_t n = indices.size();
    if (n == 0) throw std::invalid_argument("rec loss: empty batch");
    std::vector<double> x(n * batch.dim);
    for (std::size_t k = 0; k < n; ++k)
        std::copy_n(batch.x.data() + indices[k] * batch.dim, batch.dim,
                    x.data() + k * batch.dim);
    BatchGrad bg = net_gradients(
        rec, x.data(), n,
        [&](std::size_t k, std::span<const double> y, std::span<double> dLdy) {
            return per_sample(indices[k], y, dLdy);
        },
        mode);
    if (grad) *grad = std::move(bg.grad);
    return bg.loss;
}

double ce_sample(const RecBatch& batch, std::size_t row, double f_raw,
                 double* dLdF) {
    const double f = clamp_prob(f_raw);
    const double a = batch.label[row];
    if (dLdF && f_raw > kProbEps && f_raw < 1.0 - kProbEps)
        *dLdF = -a / f + (1.0 - a) / (1.0 - f);
    return -(a * std::log(f) + (1.0 - a) * std::log(1.0 - f));
}

double align_sample(const RecBatch& batch, std::size_t row, double f_raw,
                    double* dLdF) {
    const double rp = batch.r_pos[row];
    const double rn = batch.r_neg[row];
    if (dLdF) *dLdF = -(rp - rn);
    return -(rp * f_raw + rn * (1.0 - f_raw));
}

}  // namespace

void AlignConfig::validate() const {
    if (kappa < 0.0 || rl_kappa < 0.0)
        throw std::invalid_argument("align: kappa must be >= 0");
    if (!(learning_rate > 0.0) || !(policy_learning_rate > 0.0))
        throw std::invalid_argument("align: learning rates must be positive");
    if (batch_size < 1 || epochs < 0)
        throw std::invalid_argument("align: bad batch_size/epochs");
    if (policy_iterations < 0 || policy_episodes < 1)
        throw std::invalid_argument("align: bad policy iteration counts");
}

FeedForwardNet make_rec_net(int feature_dim, const std::vector<int>& hidden,
                            SeededRng& rng) {
    return FeedForwardNet(feature_dim, hidden, 1, Activation::relu,
                          Activation::sigmoid, rng);
}

double clamp_prob(double f) {
    if (f < kProbEps) return kProbEps;
    if (f > 1.0 - kProbEps) return 1.0 - kProbEps;
    return f;
}

double score(const FeedForwardNet& rec,
             std::span<const mdp::InteractionStep> history, const mdp::Item& item,
             const mdp::Dataset& data, const mdp::FeaturizerConfig& fcfg) {
    const auto feat = mdp::encode_state(history, item, data, fcfg);
    return clamp_prob(rec.forward(feat)[0]);
}

int rank_top_item(const FeedForwardNet& rec,
                  std::span<const mdp::InteractionStep> history,
                  const mdp::Dataset& data, const mdp::FeaturizerConfig& fcfg) {
    if (data.catalog.empty())
        throw std::invalid_argument("rank_top_item: empty catalog");
    int best_id = 0;
    double best = -1.0;
    bool first = true;
    for (const auto& item : data.catalog) {
        const double s = score(rec, history, item, data, fcfg);
        if (first || s > best || (s == best && item.id < best_id)) {
            best = s;
            best_id = item.id;
            first = false;
        }
    }
    return best_id;
}

RecBatch build_rec_batch(const mdp::Dataset& data,
                         const mdp::FeaturizerConfig& fcfg) {
    RecBatch batch;
    batch.dim = mdp::feature_width(data.meta.embedding_dim, fcfg);
    batch.n = data.step_count();
    batch.x.assign(batch.n * batch.dim, 0.0);
    batch.label.assign(batch.n, 0.0);
    batch.r_pos.assign(batch.n, 0.0);
    batch.r_neg.assign(batch.n, 0.0);
    batch.annotated.assign(batch.n, 0);
    batch.ref.assign(batch.n, {0, 0, 0});

    std::size_t row = 0;
    for (const auto& traj : data.trajectories) {
        for (std::size_t t = 0; t < traj.steps.size(); ++t, ++row) {
            const auto& step = traj.steps[t];
            std::span<const mdp::InteractionStep> hist(traj.steps.data(), t);
            mdp::encode_state(hist, data.item(step.item_id), data, fcfg,
                              {batch.x.data() + row * batch.dim,
                               static_cast<std::size_t>(batch.dim)});
            batch.label[row] = step.action == Action::Positive ? 1.0 : 0.0;
            if (step.annotated_reward_pos && step.annotated_reward_neg) {
                batch.r_pos[row] = *step.annotated_reward_pos;
                batch.r_neg[row] = *step.annotated_reward_neg;
                batch.annotated[row] = 1;
            }
            batch.ref[row] = {traj.user_id, traj.traj_id, step.step_index};
        }
    }
    return batch;
}

double ce_loss(const FeedForwardNet& rec, const RecBatch& batch,
               std::span<const std::size_t> indices, Exec mode,
               std::vector<double>* grad) {
    return subset_loss(rec, batch, indices, mode, grad,
                       [&](std::size_t row, std::span<const double> y,
                           std::span<double> dLdy) {
                           return ce_sample(batch, row, y[0], &dLdy[0]);
                       });
}

double align_loss(const FeedForwardNet& rec, const RecBatch& batch,
                  std::span<const std::size_t> indices, Exec mode,
                  std::vector<double>* grad) {
    for (std::size_t row : indices) require_annotation(batch, row);
    return subset_loss(rec, batch, indices, mode, grad,
                       [&](std::size_t row, std::span<const double> y,
                           std::span<double> dLdy) {
                           return align_sample(batch, row, y[0], &dLdy[0]);
                       });
}

double final_loss(const FeedForwardNet& rec, const RecBatch& batch,
                  std::span<const std::size_t> indices, double kappa, Exec mode,
                  std::vector<double>* grad, double* ce_part, double* align_part) {
    if (kappa < 0.0) throw std::invalid_argument("final_loss: kappa must be >= 0");
    if (kappa > 0.0)
        for (std::size_t row : indices) require_annotation(batch, row);
    double ce_out = 0.0, align_out = 0.0;
    const double total = subset_loss(
        rec, batch, indices, mode, grad,
        [&](std::size_t row, std::span<const double> y, std::span<double> dLdy) {
            double d_ce = 0.0;
            const double ce = ce_sample(batch, row, y[0], &d_ce);
            dLdy[0] = d_ce;
            if (kappa == 0.0) return ce;
            double d_al = 0.0;
            const double al = align_sample(batch, row, y[0], &d_al);
            dLdy[0] += kappa * d_al;
            return ce + kappa * al;
        });
    if (ce_part || align_part) {
        // Loss-only component means on the same rows.
        for (std::size_t row : indices) {
            const double f = rec.forward({batch.x.data() + row * batch.dim,
                                          static_cast<std::size_t>(batch.dim)})[0];
            ce_out += ce_sample(batch, row, f, nullptr);
            if (batch.annotated[row]) align_out += align_sample(batch, row, f, nullptr);
        }
        if (ce_part) *ce_part = ce_out / static_cast<double>(indices.size());
        if (align_part)
            *align_part = align_out / static_cast<double>(indices.size());
    }
    return total;
}

TrainRecResult train_rec(const mdp::Dataset& train, const AlignConfig& cfg,
                         double kappa, const mdp::FeaturizerConfig& fcfg,
                         uint64_t seed, Exec mode) {
    cfg.validate();
    if (kappa > 0.0 && !train.fully_annotated())
        throw std::invalid_argument(
            "train_rec: kappa > 0 requires a fully annotated dataset");

    const RecBatch batch = build_rec_batch(train, fcfg);
    if (batch.n == 0) throw std::invalid_argument("train_rec: empty dataset");

    SeededRng init_rng = SeededRng(seed).child("rec_init");
    TrainRecResult result;
    result.net = make_rec_net(batch.dim, cfg.hidden, init_rng);
    Adam opt(result.net.param_count(), {cfg.learning_rate});
    std::vector<double> grad(result.net.param_count());

    std::vector<std::size_t> order = all_indices(batch.n);
    const std::size_t bsz = static_cast<std::size_t>(cfg.batch_size);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        SeededRng shuffle_rng =
            SeededRng(seed).child("rec_shuffle", static_cast<uint64_t>(epoch));
        for (std::size_t i = batch.n; i > 1; --i) {
            const std::size_t j =
                static_cast<std::size_t>(shuffle_rng.uniform_int(static_cast<int>(i)));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t lo = 0; lo < batch.n; lo += bsz) {
            const std::size_t hi = std::min(batch.n, lo + bsz);
            std::span<const std::size_t> ix(order.data() + lo, hi - lo);
            std::fill(grad.begin(), grad.end(), 0.0);
            final_loss(result.net, batch, ix, kappa, mode, &grad);
            opt.step(result.net.params(), grad);
        }
        // End-of-epoch losses on the full training set.
        double ce = 0.0, al = 0.0;
        const auto ix = all_indices(batch.n);
        const double fin =
            final_loss(result.net, batch, ix, kappa, mode, nullptr, &ce, &al);
        result.epochs.push_back({epoch, ce, al, fin});
    }
    return result;
}

}  // namespace mtrec::align
