// Serial-vs-OpenMP benchmark for the data-parallel kernels. Every kernel
// uses a fixed blocked summation order, so the two policies must agree
// bit-for-bit; this tool verifies that while timing them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mtrec/align/rec.hpp"
#include "mtrec/irl/loss.hpp"
#include "mtrec/irl/reward.hpp"
#include "mtrec/irl/train.hpp"
#include "mtrec/synth/rollout.hpp"

using namespace mtrec;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_best_of(int reps, const Fn& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        fn();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
    std::printf("%-28s %10.2f ms %10.2f ms %7.2fx   max|serial-parallel| = %g\n",
                name, serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                diff);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", hardware_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    synth::EnvConfig env_cfg;
    env_cfg.n_users = 400;
    const synth::SynthEnv env = synth::build_env(env_cfg, 7);
    const synth::ExpertTables tables =
        synth::soft_value_iteration(env, env_cfg.gamma, 1e-9);

    // Trajectory generation.
    synth::GenResult gen_s, gen_p;
    const double t_gen_s = time_best_of(3, [&] {
        gen_s = synth::generate_trajectories(env, tables, env_cfg.n_users,
                                             env_cfg.episode_len, 7, Exec::serial);
    });
    const double t_gen_p = time_best_of(3, [&] {
        gen_p = synth::generate_trajectories(env, tables, env_cfg.n_users,
                                             env_cfg.episode_len, 7,
                                             Exec::parallel);
    });
    report("generate_trajectories", t_gen_s, t_gen_p,
           gen_s.dataset == gen_p.dataset ? 0.0 : 1.0);

    // Soft value iteration.
    synth::ExpertTables vi_s, vi_p;
    const double t_vi_s = time_best_of(3, [&] {
        vi_s = synth::soft_value_iteration(env, env_cfg.gamma, 1e-9, 100000,
                                           Exec::serial);
    });
    const double t_vi_p = time_best_of(3, [&] {
        vi_p = synth::soft_value_iteration(env, env_cfg.gamma, 1e-9, 100000,
                                           Exec::parallel);
    });
    report("soft_value_iteration", t_vi_s, t_vi_p, max_abs_diff(vi_s.v, vi_p.v));

    // QR-IQL batch gradients.
    const mdp::FeaturizerConfig fcfg;
    const irl::TransitionBatch batch =
        irl::build_transitions(gen_s.dataset, fcfg);
    irl::IRLConfig irl_cfg;
    SeededRng init = SeededRng(7).child("bench_qnet");
    irl::QuantileQNetwork qnet(batch.dim, irl_cfg.n_quantiles, irl_cfg.hidden,
                               init);
    std::vector<std::size_t> indices(2048);
    SeededRng pick = SeededRng(7).child("bench_pick");
    for (auto& ix : indices)
        ix = static_cast<std::size_t>(pick.uniform_int(static_cast<int>(batch.n)));
    std::vector<double> grad_s(qnet.net().param_count());
    std::vector<double> grad_p(qnet.net().param_count());
    const double t_qr_s = time_best_of(5, [&] {
        std::fill(grad_s.begin(), grad_s.end(), 0.0);
        irl::qr_iq_loss(qnet, batch, indices, irl_cfg, Exec::serial, &grad_s);
    });
    const double t_qr_p = time_best_of(5, [&] {
        std::fill(grad_p.begin(), grad_p.end(), 0.0);
        irl::qr_iq_loss(qnet, batch, indices, irl_cfg, Exec::parallel, &grad_p);
    });
    report("qr_iq_loss gradients", t_qr_s, t_qr_p, max_abs_diff(grad_s, grad_p));

    // Dataset annotation.
    mdp::Dataset ann_s, ann_p;
    const double t_ann_s = time_best_of(3, [&] {
        ann_s = irl::annotate_dataset(gen_s.dataset, qnet, fcfg, irl_cfg.gamma,
                                      Exec::serial);
    });
    const double t_ann_p = time_best_of(3, [&] {
        ann_p = irl::annotate_dataset(gen_s.dataset, qnet, fcfg, irl_cfg.gamma,
                                      Exec::parallel);
    });
    report("annotate_dataset", t_ann_s, t_ann_p, ann_s == ann_p ? 0.0 : 1.0);

    // Cross-entropy batch gradients.
    const align::RecBatch rec_batch = align::build_rec_batch(gen_s.dataset, fcfg);
    SeededRng rec_init = SeededRng(7).child("bench_rec");
    align::AlignConfig align_cfg;
    const FeedForwardNet rec =
        align::make_rec_net(rec_batch.dim, align_cfg.hidden, rec_init);
    std::vector<std::size_t> rows(rec_batch.n);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<double> g2_s(rec.param_count()), g2_p(rec.param_count());
    const double t_ce_s = time_best_of(5, [&] {
        align::ce_loss(rec, rec_batch, rows, Exec::serial, &g2_s);
    });
    const double t_ce_p = time_best_of(5, [&] {
        align::ce_loss(rec, rec_batch, rows, Exec::parallel, &g2_p);
    });
    report("ce_loss gradients", t_ce_s, t_ce_p, max_abs_diff(g2_s, g2_p));

    return 0;
}
