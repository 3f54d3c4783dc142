#include "mtrec/irl/checkpoint.hpp"

#include <fstream>

#include "mtrec/common.hpp"

namespace mtrec::irl {

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_model(const std::string& path, const std::string& kind,
                const FeedForwardNet& net, const nlohmann::ordered_json& extra) {
    nlohmann::ordered_json header;
    header["schema_version"] = kCheckpointVersion;
    header["kind"] = kind;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& l : net.layers()) {
        nlohmann::ordered_json jl;
        jl["in"] = l.in;
        jl["out"] = l.out;
        jl["act"] = activation_name(l.act);
        layers.push_back(jl);
    }
    header["layers"] = layers;
    header["param_count"] = net.param_count();
    header["extra"] = extra;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open checkpoint for writing: " + path);
    f << header.dump() << '\n';
    const auto params = net.params();
    f.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!f) throw io_error("checkpoint write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(f, line)) throw io_error("checkpoint header missing: " + path);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw io_error("checkpoint header parse error in " + path + ": " + e.what());
    }
    if (header.value("schema_version", -1) != kCheckpointVersion)
        throw io_error("unsupported checkpoint schema_version in " + path);

    LoadedModel out;
    out.kind = header.value("kind", std::string{});
    out.extra = header.value("extra", nlohmann::json::object());
    std::vector<LayerSpec> layers;
    for (const auto& jl : header.at("layers")) {
        LayerSpec l;
        l.in = jl.at("in").get<int>();
        l.out = jl.at("out").get<int>();
        l.act = activation_from_name(jl.at("act").get<std::string>());
        layers.push_back(l);
    }
    const auto n_params = header.at("param_count").get<std::size_t>();
    std::vector<double> params(n_params);
    f.read(reinterpret_cast<char*>(params.data()),
           static_cast<std::streamsize>(n_params * sizeof(double)));
    if (static_cast<std::size_t>(f.gcount()) != n_params * sizeof(double))
        throw io_error("checkpoint payload truncated: " + path);
    out.net = FeedForwardNet::from_spec(std::move(layers), std::move(params));
    return out;
}

}  // namespace mtrec::irl
