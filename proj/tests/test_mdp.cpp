#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "mtrec/common.hpp"
#include "mtrec/mdp/features.hpp"
#include "mtrec/mdp/io.hpp"
#include "mtrec/mdp/split.hpp"
#include "mtrec/numerics/rng.hpp"

using namespace mtrec;
using namespace mtrec::mdp;

namespace {

Item make_item(int id, int topic, bool cb, std::vector<double> emb) {
    return Item{id, topic, cb, std::move(emb)};
}

Dataset small_dataset() {
    Dataset d;
    d.meta.seed = 9;
    d.meta.embedding_dim = 2;
    d.meta.env_config_hash = "abc123";
    d.catalog.push_back(make_item(0, 0, false, {1.0, 0.0}));
    d.catalog.push_back(make_item(1, 1, true, {0.25, -0.5}));
    d.rebuild_index();
    Trajectory t;
    t.user_id = 4;
    t.traj_id = 4;
    for (int i = 0; i < 3; ++i) {
        InteractionStep s;
        s.user_id = 4;
        s.item_id = i % 2;
        s.action = i == 1 ? Action::Positive : Action::Negative;
        s.step_index = i;
        s.realized_true_reward = 0.5 * i - 0.25;
        t.steps.push_back(s);
    }
    d.trajectories.push_back(t);
    return d;
}

Dataset random_dataset(SeededRng& rng) {
    Dataset d;
    d.meta.seed = rng.next_u64();
    d.meta.embedding_dim = 1 + rng.uniform_int(4);
    d.meta.env_config_hash = to_hex(rng.next_u64());
    const int n_items = 1 + rng.uniform_int(5);
    for (int i = 0; i < n_items; ++i) {
        std::vector<double> emb(d.meta.embedding_dim);
        for (auto& e : emb) e = rng.normal();
        d.catalog.push_back(make_item(i, rng.uniform_int(3), rng.uniform() < 0.5,
                                      std::move(emb)));
    }
    d.rebuild_index();
    const int n_traj = 1 + rng.uniform_int(4);
    for (int u = 0; u < n_traj; ++u) {
        Trajectory t;
        t.user_id = u;
        t.traj_id = u;
        const int len = 1 + rng.uniform_int(5);
        for (int i = 0; i < len; ++i) {
            InteractionStep s;
            s.user_id = u;
            s.item_id = rng.uniform_int(n_items);
            s.action = rng.uniform() < 0.5 ? Action::Positive : Action::Negative;
            s.step_index = i;
            if (rng.uniform() < 0.7) s.realized_true_reward = rng.normal();
            if (rng.uniform() < 0.5) {
                s.annotated_reward_pos = rng.normal();
                s.annotated_reward_neg = rng.normal();
            }
            t.steps.push_back(s);
        }
        d.trajectories.push_back(t);
    }
    return d;
}

}  // namespace

TEST_CASE("encode_state: empty history yields zero blocks plus the candidate") {
    Dataset d = small_dataset();
    FeaturizerConfig f{3, 2, 10.0};
    const auto v = encode_state({}, d.catalog[1], d, f);
    REQUIRE(static_cast<int>(v.size()) == feature_width(2, f));
    for (int i = 0; i < 2 + 2 + 1; ++i) CHECK(v[i] == 0.0);
    CHECK(v[5] == 0.25);
    CHECK(v[6] == -0.5);
}

TEST_CASE("encode_state: determinism and single-positive mean block") {
    Dataset d = small_dataset();
    FeaturizerConfig f{3, 2, 10.0};
    std::vector<InteractionStep> hist;
    InteractionStep s;
    s.item_id = 0;  // embedding {1, 0}
    s.action = Action::Positive;
    s.step_index = 0;
    hist.push_back(s);
    const auto a = encode_state(hist, d.catalog[1], d, f);
    const auto b = encode_state(hist, d.catalog[1], d, f);
    CHECK(a == b);
    CHECK(a[0] == 1.0);  // mean block equals the consumed item's embedding
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 1.0);  // most recent action flag
    CHECK(a[3] == 0.0);
    CHECK(a[4] == doctest::Approx(0.1));  // one step over step_norm 10
}

TEST_CASE("encode_state: only Positive steps enter the mean block") {
    Dataset d = small_dataset();
    FeaturizerConfig f{5, 3, 10.0};
    std::vector<InteractionStep> hist;
    InteractionStep skip;
    skip.item_id = 1;
    skip.action = Action::Negative;
    skip.step_index = 0;
    hist.push_back(skip);
    const auto v = encode_state(hist, d.catalog[0], d, f);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 0.0);
    CHECK(v[2] == 0.0);  // flag for the skipped step
}

TEST_CASE("feature width is constant for a fixed config") {
    FeaturizerConfig f;
    CHECK(feature_width(5, f) == 5 + f.flags + 1 + 5);
    CHECK(history_width(5, f) == 5 + f.flags + 1);
}

TEST_CASE("dataset round-trip identity on a hand-built dataset") {
    const Dataset d = small_dataset();
    const std::string text = dataset_to_string(d);
    const Dataset back = dataset_from_string(text, "mem");
    CHECK(back == d);
    CHECK(dataset_to_string(back) == text);
}

TEST_CASE("dataset round-trip identity on random datasets (property)") {
    SeededRng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Dataset d = random_dataset(rng);
        const Dataset back = dataset_from_string(dataset_to_string(d), "mem");
        CHECK(back == d);
    }
}

TEST_CASE("dataset file round-trip through the filesystem") {
    const Dataset d = small_dataset();
    const std::string path =
        (std::filesystem::temp_directory_path() / "mtrec_test_ds.jsonl").string();
    write_dataset(d, path);
    CHECK(read_dataset(path) == d);
    std::filesystem::remove(path);
}

TEST_CASE("unknown schema version is rejected with the version") {
    const std::string text = "{\"schema_version\": 99}\n";
    try {
        dataset_from_string(text, "mem");
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
}

TEST_CASE("step referencing an unknown item names the id") {
    std::string text =
        "{\"schema_version\":1,\"seed\":0,\"embedding_dim\":1,\"env_config_hash\":\"x\"}\n"
        "{\"kind\":\"item\",\"id\":0,\"topic\":0,\"clickbait\":false,\"embedding\":[0.5]}\n"
        "{\"kind\":\"step\",\"user\":0,\"traj\":0,\"t\":0,\"item\":42,\"action\":1}\n";
    try {
        dataset_from_string(text, "mem");
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("malformed record carries its line number") {
    std::string text =
        "{\"schema_version\":1,\"seed\":0,\"embedding_dim\":1,\"env_config_hash\":\"x\"}\n"
        "{\"kind\":\"item\",\"id\":0,\"topic\":0,\"clickbait\":false,\"embedding\":[0.5]}\n"
        "not json\n";
    try {
        dataset_from_string(text, "data");
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(std::string(e.what()).find("data:3") != std::string::npos);
    }
}

TEST_CASE("split_dataset: 10 users with ncis_frac 0.1 puts one user in NCIS") {
    Dataset d;
    d.meta.embedding_dim = 1;
    d.catalog.push_back(make_item(0, 0, false, {1.0}));
    d.rebuild_index();
    for (int u = 0; u < 10; ++u) {
        Trajectory t;
        t.user_id = u;
        t.traj_id = u;
        InteractionStep s;
        s.user_id = u;
        s.item_id = 0;
        s.action = Action::Positive;
        s.step_index = 0;
        t.steps.push_back(s);
        d.trajectories.push_back(t);
    }
    const DatasetSplits sp = split_dataset(d, 0.7, 0.1, 5);
    CHECK(sp.ncis.trajectories.size() == 1);
    CHECK(sp.train.trajectories.size() == 7);
    CHECK(sp.test.trajectories.size() == 2);

    // user-disjoint
    std::set<int> seen;
    for (const auto* part : {&sp.train, &sp.test, &sp.ncis})
        for (const auto& t : part->trajectories)
            CHECK(seen.insert(t.user_id).second);
    CHECK(seen.size() == 10);

    const DatasetSplits sp2 = split_dataset(d, 0.7, 0.1, 5);
    CHECK(sp2.train.trajectories == sp.train.trajectories);
    CHECK(sp2.test.trajectories == sp.test.trajectories);
    CHECK(sp2.ncis.trajectories == sp.ncis.trajectories);

    CHECK_THROWS_AS(split_dataset(d, 0.98, 0.1, 5), std::invalid_argument);
    CHECK_THROWS_AS(split_dataset(d, 0.95, 0.04, 5), std::invalid_argument);
}

TEST_CASE("split is user-disjoint over random datasets (property)") {
    SeededRng rng(23);
    int done = 0;
    for (int trial = 0; trial < 300 && done < 100; ++trial) {
        Dataset d = random_dataset(rng);
        std::set<int> users;
        for (const auto& t : d.trajectories) users.insert(t.user_id);
        if (users.size() < 4) continue;
        ++done;
        const DatasetSplits sp = split_dataset(d, 0.5, 0.25, rng.next_u64());
        std::set<int> seen;
        std::size_t total = 0;
        for (const auto* part : {&sp.train, &sp.test, &sp.ncis}) {
            std::set<int> part_users;
            for (const auto& t : part->trajectories) part_users.insert(t.user_id);
            for (int u : part_users) CHECK(seen.insert(u).second);
            total += part->trajectories.size();
        }
        CHECK(total == d.trajectories.size());
    }
    CHECK(done > 0);
}
