#include "mtrec/irl/loss.hpp"

#include <cmath>

#include "mtrec/common.hpp"
#include "mtrec/numerics/reductions.hpp"

namespace mtrec::irl {

using mdp::Action;

namespace {

constexpr std::size_t kBlock = 64;

struct PairSoftmax {
    double lse;
    double p0, p1;
};

PairSoftmax pair_lse(double a0, double a1) {
    const double m = a0 > a1 ? a0 : a1;
    const double e0 = std::exp(a0 - m);
    const double e1 = std::exp(a1 - m);
    const double lse = m + std::log(e0 + e1);
    return {lse, e0 / (e0 + e1), e1 / (e0 + e1)};
}

// Per-block workspace reused across the block's samples.
struct Scratch {
    FeedForwardNet::Trace tr_s, tr_sp;
    std::vector<double> gy, gyp;
};

// Blocked deterministic reduction shared by both objectives. per_sample
// accumulates parameter gradients into g (when non-null) and returns the
// sample loss.
template <typename PerSample>
double reduce_batch(const QuantileQNetwork& qnet,
                    std::span<const std::size_t> indices, Exec mode,
                    std::vector<double>* grad, const PerSample& per_sample) {
    const std::size_t n = indices.size();
    if (n == 0) throw std::invalid_argument("irl loss: empty batch");
    const std::size_t p = qnet.net().param_count();
    const std::size_t out_w = static_cast<std::size_t>(qnet.net().output_width());
    const std::size_t nblocks = block_count(n, kBlock);
    std::vector<std::vector<double>> block_grad(grad ? nblocks : 0);
    std::vector<double> block_loss(nblocks, 0.0);

    for_blocks(n, kBlock, mode, [&](std::size_t lo, std::size_t hi, std::size_t b) {
        double* g = nullptr;
        if (grad) {
            block_grad[b].assign(p, 0.0);
            g = block_grad[b].data();
        }
        Scratch ws;
        ws.gy.assign(out_w, 0.0);
        ws.gyp.assign(out_w, 0.0);
        double loss = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            const double l = per_sample(indices[k], ws, g);
            if (!std::isfinite(l))
                throw numeric_error("irl loss: non-finite value at sample index " +
                                        std::to_string(indices[k]),
                                    static_cast<long long>(indices[k]));
            loss += l;
        }
        block_loss[b] = loss;
    });

    double total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) total += block_loss[b];
    const double inv = 1.0 / static_cast<double>(n);
    if (grad) {
        for (std::size_t b = 0; b < nblocks; ++b)
            for (std::size_t i = 0; i < p; ++i) (*grad)[i] += block_grad[b][i];
        for (double& gi : *grad) gi *= inv;
    }
    return total * inv;
}

}  // namespace

TransitionBatch build_transitions(const mdp::Dataset& data,
                                  const mdp::FeaturizerConfig& fcfg) {
    TransitionBatch batch;
    batch.dim = mdp::feature_width(data.meta.embedding_dim, fcfg);
    batch.n = data.step_count();
    if (batch.n == 0)
        throw std::invalid_argument("build_transitions: dataset has no steps");
    batch.s.assign(batch.n * batch.dim, 0.0);
    batch.sp.assign(batch.n * batch.dim, 0.0);
    batch.action.assign(batch.n, 0);
    batch.terminal.assign(batch.n, 0);

    std::size_t row = 0;
    for (const auto& traj : data.trajectories) {
        for (std::size_t t = 0; t < traj.steps.size(); ++t, ++row) {
            const auto& step = traj.steps[t];
            std::span<const mdp::InteractionStep> hist(traj.steps.data(), t);
            mdp::encode_state(hist, data.item(step.item_id), data, fcfg,
                              {batch.s.data() + row * batch.dim,
                               static_cast<std::size_t>(batch.dim)});
            batch.action[row] = mdp::action_label(step.action);
            if (t + 1 == traj.steps.size()) {
                batch.terminal[row] = 1;
            } else {
                std::span<const mdp::InteractionStep> hist2(traj.steps.data(), t + 1);
                mdp::encode_state(hist2, data.item(traj.steps[t + 1].item_id), data,
                                  fcfg,
                                  {batch.sp.data() + row * batch.dim,
                                   static_cast<std::size_t>(batch.dim)});
            }
        }
    }
    return batch;
}

double qr_iq_loss(const QuantileQNetwork& qnet, const TransitionBatch& batch,
                  std::span<const std::size_t> indices, const IRLConfig& cfg,
                  Exec mode, std::vector<double>* grad) {
    const int n_q = qnet.n_quantiles();
    const auto& tau = qnet.levels();
    const auto& net = qnet.net();
    const double inv4a = 1.0 / (4.0 * cfg.alpha);
    const double g_boot = cfg.include_gamma_in_u2 ? cfg.gamma : 1.0;
    const std::size_t dim = static_cast<std::size_t>(batch.dim);

    return reduce_batch(
        qnet, indices, mode, grad,
        [&](std::size_t row, Scratch& ws, double* g) -> double {
            const int a = batch.action[row];
            const bool terminal = batch.terminal[row] != 0;
            net.forward_trace({batch.s.data() + row * dim, dim}, ws.tr_s);
            if (!terminal)
                net.forward_trace({batch.sp.data() + row * dim, dim}, ws.tr_sp);
            const auto& y = net.output(ws.tr_s);

            std::fill(ws.gy.begin(), ws.gy.end(), 0.0);
            std::fill(ws.gyp.begin(), ws.gyp.end(), 0.0);
            double loss = 0.0;
            for (int i = 0; i < n_q; ++i) {
                const double lam_n = y[i];
                const double lam_p = y[n_q + i];
                const double lam_a = a == 1 ? lam_p : lam_n;
                const PairSoftmax sm = pair_lse(lam_n, lam_p);
                const double u1 = lam_a - sm.lse;
                double vp = 0.0;
                PairSoftmax smp{0.0, 0.0, 0.0};
                if (!terminal) {
                    const auto& ypv = net.output(ws.tr_sp);
                    smp = pair_lse(ypv[i], ypv[n_q + i]);
                    vp = smp.lse;
                }
                const double e = lam_a - g_boot * vp;
                const double u2 = inv4a * e * e;
                if (u1 > 0.0 || u2 < 0.0)
                    throw numeric_error(
                        "qr_iq_loss: error sign invariant violated at sample " +
                            std::to_string(row),
                        static_cast<long long>(row));
                loss += pinball_loss(tau[i], u1) + pinball_loss(tau[i], u2);
                if (g) {
                    const double w1 = pinball_grad(tau[i], u1);
                    ws.gy[i] += w1 * ((a == 0 ? 1.0 : 0.0) - sm.p0);
                    ws.gy[n_q + i] += w1 * ((a == 1 ? 1.0 : 0.0) - sm.p1);
                    const double de = pinball_grad(tau[i], u2) * inv4a * 2.0 * e;
                    ws.gy[a * n_q + i] += de;
                    if (!terminal) {
                        ws.gyp[i] += de * (-g_boot * smp.p0);
                        ws.gyp[n_q + i] += de * (-g_boot * smp.p1);
                    }
                }
            }
            if (g) {
                net.backward(ws.tr_s, ws.gy, {g, net.param_count()});
                if (!terminal) net.backward(ws.tr_sp, ws.gyp, {g, net.param_count()});
            }
            return loss;
        });
}

double iq_loss_scalar(const QuantileQNetwork& qnet, const TransitionBatch& batch,
                      std::span<const std::size_t> indices, const IRLConfig& cfg,
                      Exec mode, std::vector<double>* grad) {
    if (qnet.n_quantiles() != 1)
        throw std::invalid_argument("iq_loss_scalar: requires a single quantile");
    const auto& net = qnet.net();
    const double inv4a = 1.0 / (4.0 * cfg.alpha);
    const std::size_t dim = static_cast<std::size_t>(batch.dim);

    return reduce_batch(
        qnet, indices, mode, grad,
        [&](std::size_t row, Scratch& ws, double* g) -> double {
            const int a = batch.action[row];
            const bool terminal = batch.terminal[row] != 0;
            net.forward_trace({batch.s.data() + row * dim, dim}, ws.tr_s);
            if (!terminal)
                net.forward_trace({batch.sp.data() + row * dim, dim}, ws.tr_sp);
            const auto& y = net.output(ws.tr_s);
            const double q_a = y[a];
            const PairSoftmax sm = pair_lse(y[0], y[1]);
            double vp = 0.0;
            PairSoftmax smp{0.0, 0.0, 0.0};
            if (!terminal) {
                const auto& ypv = net.output(ws.tr_sp);
                smp = pair_lse(ypv[0], ypv[1]);
                vp = smp.lse;
            }
            const double e = q_a - cfg.gamma * vp;
            const double loss = -(q_a - sm.lse) + inv4a * e * e;
            if (g) {
                ws.gy[0] = -((a == 0 ? 1.0 : 0.0) - sm.p0);
                ws.gy[1] = -((a == 1 ? 1.0 : 0.0) - sm.p1);
                ws.gy[a] += inv4a * 2.0 * e;
                net.backward(ws.tr_s, ws.gy, {g, net.param_count()});
                if (!terminal) {
                    const double de = inv4a * 2.0 * e * (-cfg.gamma);
                    ws.gyp[0] = de * smp.p0;
                    ws.gyp[1] = de * smp.p1;
                    net.backward(ws.tr_sp, ws.gyp, {g, net.param_count()});
                }
            }
            return loss;
        });
}

}  // namespace mtrec::irl
