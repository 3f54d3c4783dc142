#include "mtrec/mdp/types.hpp"

#include <stdexcept>

namespace mtrec::mdp {

const Item& Dataset::item(int id) const {
    if (index_.size() != catalog.size()) {
        index_.clear();
        for (std::size_t i = 0; i < catalog.size(); ++i) index_[catalog[i].id] = i;
    }
    auto it = index_.find(id);
    if (it == index_.end())
        throw std::invalid_argument("dataset: unknown item id " + std::to_string(id));
    return catalog[it->second];
}

bool Dataset::has_item(int id) const {
    if (index_.size() != catalog.size()) {
        index_.clear();
        for (std::size_t i = 0; i < catalog.size(); ++i) index_[catalog[i].id] = i;
    }
    return index_.count(id) > 0;
}

void Dataset::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < catalog.size(); ++i) index_[catalog[i].id] = i;
}

std::size_t Dataset::step_count() const {
    std::size_t n = 0;
    for (const auto& t : trajectories) n += t.steps.size();
    return n;
}

bool Dataset::fully_annotated() const {
    for (const auto& t : trajectories)
        for (const auto& s : t.steps)
            if (!s.annotated_reward_pos || !s.annotated_reward_neg) return false;
    return true;
}

bool Dataset::operator==(const Dataset& other) const {
    auto item_eq = [](const Item& a, const Item& b) {
        return a.id == b.id && a.topic == b.topic && a.clickbait == b.clickbait &&
               a.embedding == b.embedding;
    };
    if (!(meta == other.meta)) return false;
    if (catalog.size() != other.catalog.size()) return false;
    for (std::size_t i = 0; i < catalog.size(); ++i)
        if (!item_eq(catalog[i], other.catalog[i])) return false;
    return trajectories == other.trajectories;
}

}  // namespace mtrec::mdp
