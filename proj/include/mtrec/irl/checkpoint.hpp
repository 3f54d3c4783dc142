#pragma once

#include <string>

#include <json.hpp>

#include "mtrec/numerics/net.hpp"

namespace mtrec::irl {

// Checkpoint file: one JSON header line (schema version, kind tag, layer
// shapes, caller extras) followed by the raw little-endian 64-bit parameter
// payload. Loading reproduces inference bit-exactly.
void save_model(const std::string& path, const std::string& kind,
                const FeedForwardNet& net, const nlohmann::ordered_json& extra);

struct LoadedModel {
    std::string kind;
    FeedForwardNet net;
    nlohmann::json extra;
};

LoadedModel load_model(const std::string& path);

}  // namespace mtrec::irl
