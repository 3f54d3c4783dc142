#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtrec::mdp {

// User response to a displayed item. Positive encodes a^P = 1 in losses,
// Negative encodes a^N = 0.
enum class Action : int { Negative = 0, Positive = 1 };

inline int action_label(Action a) { return a == Action::Positive ? 1 : 0; }

struct Item {
    int id = 0;
    int topic = 0;
    bool clickbait = false;
    std::vector<double> embedding;
};

struct InteractionStep {
    int user_id = 0;
    int item_id = 0;
    Action action = Action::Negative;
    int step_index = 0;
    // Simulator-only ground truth; absent in externally loaded data.
    std::optional<double> realized_true_reward;
    // Recovered mental rewards r*(s, a^P) and r*(s, a^N), filled by annotation.
    std::optional<double> annotated_reward_pos;
    std::optional<double> annotated_reward_neg;

    bool operator==(const InteractionStep&) const = default;
};

struct Trajectory {
    int user_id = 0;
    int traj_id = 0;
    std::vector<InteractionStep> steps;

    bool operator==(const Trajectory&) const = default;
};

struct DatasetMeta {
    int schema_version = 1;
    uint64_t seed = 0;
    int embedding_dim = 0;
    std::string env_config_hash;

    bool operator==(const DatasetMeta&) const = default;
};

struct Dataset {
    DatasetMeta meta;
    std::vector<Item> catalog;
    std::vector<Trajectory> trajectories;

    const Item& item(int id) const;
    bool has_item(int id) const;
    void rebuild_index();
    std::size_t step_count() const;
    // True when every step carries both annotated rewards.
    bool fully_annotated() const;

    bool operator==(const Dataset& other) const;

private:
    mutable std::unordered_map<int, std::size_t> index_;
};

}  // namespace mtrec::mdp
