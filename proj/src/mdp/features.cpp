#include "mtrec/mdp/features.hpp"

#include <algorithm>
#include <stdexcept>

#include "mtrec/common.hpp"

namespace mtrec::mdp {

int history_width(int embedding_dim, const FeaturizerConfig& cfg) {
    return embedding_dim + cfg.flags + 1;
}

int feature_width(int embedding_dim, const FeaturizerConfig& cfg) {
    return history_width(embedding_dim, cfg) + embedding_dim;
}

void encode_history(std::span<const InteractionStep> history, const Dataset& data,
                    const FeaturizerConfig& cfg, std::span<double> out) {
    if (cfg.window < 1 || cfg.flags < 1)
        throw std::invalid_argument("featurizer: window and flags must be >= 1");
    const int e = data.meta.embedding_dim;
    if (static_cast<int>(out.size()) != history_width(e, cfg))
        throw std::invalid_argument("encode_history: output width mismatch");
    std::fill(out.begin(), out.end(), 0.0);

    // Mean embedding over the most recent `window` consumed items.
    int consumed = 0;
    for (std::size_t i = history.size(); i-- > 0 && consumed < cfg.window;) {
        if (history[i].action != Action::Positive) continue;
        const auto& emb = data.item(history[i].item_id).embedding;
        for (int d = 0; d < e; ++d) out[d] += emb[d];
        ++consumed;
    }
    if (consumed > 0)
        for (int d = 0; d < e; ++d) out[d] /= consumed;

    // Most recent action first; zero-padded when the history is shorter.
    for (int f = 0; f < cfg.flags; ++f) {
        if (f >= static_cast<int>(history.size())) break;
        const auto& step = history[history.size() - 1 - f];
        out[e + f] = step.action == Action::Positive ? 1.0 : 0.0;
    }

    out[e + cfg.flags] =
        std::min(1.0, static_cast<double>(history.size()) / cfg.step_norm);
}

void encode_state(std::span<const InteractionStep> history, const Item& candidate,
                  const Dataset& data, const FeaturizerConfig& cfg,
                  std::span<double> out) {
    const int e = data.meta.embedding_dim;
    if (static_cast<int>(out.size()) != feature_width(e, cfg))
        throw std::invalid_argument("encode_state: output width mismatch");
    const int hw = history_width(e, cfg);
    encode_history(history, data, cfg, out.first(hw));
    if (static_cast<int>(candidate.embedding.size()) != e)
        throw std::invalid_argument("encode_state: candidate embedding width mismatch");
    std::copy(candidate.embedding.begin(), candidate.embedding.end(),
              out.begin() + hw);
}

std::vector<double> encode_state(std::span<const InteractionStep> history,
                                 const Item& candidate, const Dataset& data,
                                 const FeaturizerConfig& cfg) {
    std::vector<double> out(feature_width(data.meta.embedding_dim, cfg));
    encode_state(history, candidate, data, cfg, out);
    return out;
}

uint64_t featurizer_hash(const FeaturizerConfig& cfg, int embedding_dim,
                         const std::string& env_config_hash) {
    uint64_t h = fnv1a64(&cfg.window, sizeof(cfg.window));
    h = fnv1a64(&cfg.flags, sizeof(cfg.flags), h);
    h = fnv1a64(&cfg.step_norm, sizeof(cfg.step_norm), h);
    h = fnv1a64(&embedding_dim, sizeof(embedding_dim), h);
    h = fnv1a64(env_config_hash.data(), env_config_hash.size(), h);
    return h;
}

}  // namespace mtrec::mdp
