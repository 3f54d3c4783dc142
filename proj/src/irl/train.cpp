#include "mtrec/irl/train.hpp"

#include "mtrec/common.hpp"
#include "mtrec/numerics/adam.hpp"

namespace mtrec::irl {

TrainIrlResult train_irl(const mdp::Dataset& data, IRLConfig cfg, Mode mode,
                         const mdp::FeaturizerConfig& fcfg, uint64_t seed,
                         Exec exec) {
    if (mode == Mode::scalar) cfg.n_quantiles = 1;
    cfg.validate();

    const TransitionBatch batch = build_transitions(data, fcfg);
    SeededRng init_rng = SeededRng(seed).child("irl_init");
    TrainIrlResult result;
    result.qnet =
        QuantileQNetwork(batch.dim, cfg.n_quantiles, cfg.hidden, init_rng);

    Adam opt(result.qnet.net().param_count(), {cfg.learning_rate});
    SeededRng batch_rng = SeededRng(seed).child("irl_batch");
    std::vector<std::size_t> indices(cfg.batch_size);
    std::vector<double> grad(result.qnet.net().param_count());

    for (long long it = 0; it < cfg.iterations; ++it) {
        for (auto& ix : indices)
            ix = static_cast<std::size_t>(
                batch_rng.uniform_int(static_cast<int>(batch.n)));
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        try {
            loss = mode == Mode::scalar
                       ? iq_loss_scalar(result.qnet, batch, indices, cfg, exec, &grad)
                       : qr_iq_loss(result.qnet, batch, indices, cfg, exec, &grad);
        } catch (const numeric_error& e) {
            throw numeric_error("train_irl: iteration " + std::to_string(it) +
                                    ": " + e.what(),
                                it);
        }
        opt.step(result.qnet.net().params(), grad);
        if ((it + 1) % 100 == 0) result.loss_curve.emplace_back(it + 1, loss);
    }
    return result;
}

}  // namespace mtrec::irl
