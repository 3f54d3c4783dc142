#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mtrec/mdp/types.hpp"

namespace mtrec::mdp {

// Fixed-width state encoding: mean embedding of the last `window` consumed
// (Positive) items | last `flags` action flags (most recent first) |
// step index / step_norm (capped at 1) | candidate item embedding.
struct FeaturizerConfig {
    int window = 10;
    int flags = 5;
    double step_norm = 20.0;

    bool operator==(const FeaturizerConfig&) const = default;
};

int history_width(int embedding_dim, const FeaturizerConfig& cfg);
int feature_width(int embedding_dim, const FeaturizerConfig& cfg);

// History-only blocks (used by the item-selection policy).
void encode_history(std::span<const InteractionStep> history, const Dataset& data,
                    const FeaturizerConfig& cfg, std::span<double> out);

// Full state features for a candidate item.
void encode_state(std::span<const InteractionStep> history, const Item& candidate,
                  const Dataset& data, const FeaturizerConfig& cfg,
                  std::span<double> out);
std::vector<double> encode_state(std::span<const InteractionStep> history,
                                 const Item& candidate, const Dataset& data,
                                 const FeaturizerConfig& cfg);

// Binds a checkpoint to the featurization and catalog family it was trained
// against.
uint64_t featurizer_hash(const FeaturizerConfig& cfg, int embedding_dim,
                         const std::string& env_config_hash);

}  // namespace mtrec::mdp
