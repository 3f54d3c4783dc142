#include "mtrec/mdp/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtrec/common.hpp"

namespace mtrec::mdp {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void malformed(const std::string& origin, std::size_t line,
                            const std::string& why) {
    throw io_error(origin + ":" + std::to_string(line) +
                   ": malformed record: " + why);
}

}  // namespace

std::string dataset_to_string(const Dataset& data) {
    std::ostringstream out;
    ordered_json header;
    header["schema_version"] = data.meta.schema_version;
    header["seed"] = data.meta.seed;
    header["embedding_dim"] = data.meta.embedding_dim;
    header["env_config_hash"] = data.meta.env_config_hash;
    out << header.dump() << '\n';
    for (const auto& item : data.catalog) {
        ordered_json j;
        j["kind"] = "item";
        j["id"] = item.id;
        j["topic"] = item.topic;
        j["clickbait"] = item.clickbait;
        j["embedding"] = item.embedding;
        out << j.dump() << '\n';
    }
    for (const auto& traj : data.trajectories) {
        for (const auto& s : traj.steps) {
            ordered_json j;
            j["kind"] = "step";
            j["user"] = traj.user_id;
            j["traj"] = traj.traj_id;
            j["t"] = s.step_index;
            j["item"] = s.item_id;
            j["action"] = action_label(s.action);
            if (s.realized_true_reward) j["true_r"] = *s.realized_true_reward;
            if (s.annotated_reward_pos) j["r_pos"] = *s.annotated_reward_pos;
            if (s.annotated_reward_neg) j["r_neg"] = *s.annotated_reward_neg;
            out << j.dump() << '\n';
        }
    }
    return out.str();
}

void write_dataset(const Dataset& data, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << dataset_to_string(data);
    if (!f) throw io_error("write failed: " + path);
}

Dataset dataset_from_string(const std::string& text, const std::string& origin) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw io_error(origin + ": empty dataset file");
    ++line_no;
    ordered_json header;
    try {
        header = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        malformed(origin, line_no, e.what());
    }
    if (!header.contains("schema_version") ||
        !header["schema_version"].is_number_integer())
        malformed(origin, line_no, "missing schema_version");
    const int version = header["schema_version"].get<int>();
    if (version != kSchemaVersion)
        throw io_error(origin + ": unsupported schema_version " +
                       std::to_string(version) + " (expected " +
                       std::to_string(kSchemaVersion) + ")");
    data.meta.schema_version = version;
    data.meta.seed = header.value("seed", uint64_t{0});
    data.meta.embedding_dim = header.value("embedding_dim", 0);
    data.meta.env_config_hash = header.value("env_config_hash", std::string{});

    Trajectory* cur = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            malformed(origin, line_no, e.what());
        }
        const std::string kind = j.value("kind", std::string{});
        if (kind == "item") {
            Item item;
            try {
                item.id = j.at("id").get<int>();
                item.topic = j.at("topic").get<int>();
                item.clickbait = j.at("clickbait").get<bool>();
                item.embedding = j.at("embedding").get<std::vector<double>>();
            } catch (const nlohmann::json::exception& e) {
                malformed(origin, line_no, e.what());
            }
            if (static_cast<int>(item.embedding.size()) != data.meta.embedding_dim)
                malformed(origin, line_no, "embedding width mismatch");
            data.catalog.push_back(std::move(item));
            data.rebuild_index();
        } else if (kind == "step") {
            InteractionStep s;
            int user = 0, traj = 0;
            try {
                user = j.at("user").get<int>();
                traj = j.at("traj").get<int>();
                s.step_index = j.at("t").get<int>();
                s.item_id = j.at("item").get<int>();
                const int a = j.at("action").get<int>();
                if (a != 0 && a != 1) malformed(origin, line_no, "action must be 0 or 1");
                s.action = a == 1 ? Action::Positive : Action::Negative;
                if (j.contains("true_r")) s.realized_true_reward = j["true_r"].get<double>();
                if (j.contains("r_pos")) s.annotated_reward_pos = j["r_pos"].get<double>();
                if (j.contains("r_neg")) s.annotated_reward_neg = j["r_neg"].get<double>();
            } catch (const io_error&) {
                throw;
            } catch (const nlohmann::json::exception& e) {
                malformed(origin, line_no, e.what());
            }
            s.user_id = user;
            if (!data.has_item(s.item_id))
                throw io_error(origin + ":" + std::to_string(line_no) +
                               ": step references unknown item id " +
                               std::to_string(s.item_id));
            if (cur == nullptr || cur->user_id != user || cur->traj_id != traj) {
                data.trajectories.push_back(Trajectory{user, traj, {}});
                cur = &data.trajectories.back();
            }
            if (!cur->steps.empty() && s.step_index <= cur->steps.back().step_index)
                malformed(origin, line_no, "step index not increasing");
            cur->steps.push_back(std::move(s));
        } else {
            malformed(origin, line_no, "unknown kind '" + kind + "'");
        }
    }
    data.rebuild_index();
    return data;
}

Dataset read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open dataset: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return dataset_from_string(buf.str(), path);
}

}  // namespace mtrec::mdp
