#include "mtrec/mdp/split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "mtrec/numerics/rng.hpp"

namespace mtrec::mdp {

DatasetSplits split_dataset(const Dataset& data, double train_frac,
                            double ncis_frac, uint64_t seed) {
    if (!(train_frac > 0.0 && train_frac < 1.0) ||
        !(ncis_frac > 0.0 && ncis_frac < 1.0) || train_frac + ncis_frac >= 1.0)
        throw std::invalid_argument(
            "split_dataset: fractions must be in (0,1) and sum below 1");

    std::vector<int> users;
    {
        std::unordered_set<int> seen;
        for (const auto& t : data.trajectories)
            if (seen.insert(t.user_id).second) users.push_back(t.user_id);
    }
    std::sort(users.begin(), users.end());
    const auto n_users = static_cast<long long>(users.size());
    long long n_train = std::llround(train_frac * static_cast<double>(n_users));
    long long n_ncis = std::llround(ncis_frac * static_cast<double>(n_users));
    const long long n_test = n_users - n_train - n_ncis;
    if (n_train < 1 || n_ncis < 1 || n_test < 1)
        throw std::invalid_argument(
            "split_dataset: fewer users than the partitions require");

    SeededRng rng = SeededRng(seed).child("split");
    for (long long i = n_users - 1; i > 0; --i) {
        const int j = rng.uniform_int(static_cast<int>(i + 1));
        std::swap(users[i], users[j]);
    }

    std::unordered_set<int> train_users(users.begin(), users.begin() + n_train);
    std::unordered_set<int> ncis_users(users.begin() + n_train,
                                       users.begin() + n_train + n_ncis);

    DatasetSplits out;
    for (Dataset* d : {&out.train, &out.test, &out.ncis}) {
        d->meta = data.meta;
        d->catalog = data.catalog;
        d->rebuild_index();
    }
    for (const auto& t : data.trajectories) {
        if (train_users.count(t.user_id))
            out.train.trajectories.push_back(t);
        else if (ncis_users.count(t.user_id))
            out.ncis.trajectories.push_back(t);
        else
            out.test.trajectories.push_back(t);
    }
    return out;
}

}  // namespace mtrec::mdp
