#include <doctest.h>

#include <fstream>
#include <set>

#include "test_util.hpp"
#include "wavebench/dataset.hpp"
#include "wavebench/mpc.hpp"

using namespace wavebench;

namespace {

Scenario sc() { return testutil::tiny_scenario(); }

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("dataset write/load round trip") {
    const Scenario s = sc();
    const Dataset ds = generate_dataset(s, 2, 42, 1);
    const auto path = std::filesystem::temp_directory_path() / "wavebench_ds_test.wvds";
    write_dataset(ds, path);
    const Dataset back = load_dataset(path);
    CHECK(back.header.episodes == 2);
    CHECK(back.header.steps == static_cast<std::uint32_t>(s.episode_steps));
    CHECK(back.header.substeps == static_cast<std::uint32_t>(substeps_per_action(s.sim)));
    CHECK(back.header.config_hash == s.env_hash());
    CHECK(back.episodes[0].X == ds.episodes[0].X);
    CHECK(back.episodes[1].sigma == ds.episodes[1].sigma);
    std::filesystem::remove(path);
}

TEST_CASE("empty dataset still has a valid header") {
    const Scenario s = sc();
    const Dataset ds = generate_dataset(s, 0, 1, 1);
    const auto path = std::filesystem::temp_directory_path() / "wavebench_ds_empty.wvds";
    write_dataset(ds, path);
    const Dataset back = load_dataset(path);
    CHECK(back.header.episodes == 0);
    CHECK(back.episodes.empty());
    std::filesystem::remove(path);
}

TEST_CASE("generation is byte-identical across seeds and worker counts") {
    const Scenario s = sc();
    const auto p1 = std::filesystem::temp_directory_path() / "wavebench_ds_t1.wvds";
    const auto p2 = std::filesystem::temp_directory_path() / "wavebench_ds_t2.wvds";
    write_dataset(generate_dataset(s, 3, 7, 1), p1);
    write_dataset(generate_dataset(s, 3, 7, 2), p2);
    CHECK(file_bytes(p1) == file_bytes(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("stored sigma samples are finite and non-negative") {
    const Dataset ds = generate_dataset(sc(), 2, 3, 0);
    for (const auto& e : ds.episodes)
        for (float x : e.sigma) {
            CHECK(std::isfinite(x));
            CHECK(x >= 0.0f);
        }
}

TEST_CASE("sample_window") {
    const Scenario s = sc();
    Dataset ds = generate_dataset(s, 10, 5, 0);

    SUBCASE("horizon equal to the episode length forces offset zero") {
        Rng rng(1);
        for (int i = 0; i < 20; ++i) {
            const WindowRef w = sample_window(ds, s.episode_steps, rng);
            CHECK(w.offset == 0);
        }
    }

    SUBCASE("draws cover at least 99% of the valid windows") {
        const int horizon = 20;
        const int offsets = s.episode_steps - horizon + 1;
        Rng rng(2);
        std::set<std::pair<int, int>> seen;
        for (int i = 0; i < 10000; ++i) {
            const WindowRef w = sample_window(ds, horizon, rng);
            CHECK(w.offset >= 0);
            CHECK(w.offset < offsets);
            seen.insert({w.episode, w.offset});
        }
        CHECK(static_cast<double>(seen.size()) >= 0.99 * 10 * offsets);
    }

    SUBCASE("same rng state, same window") {
        Rng a(9), b(9);
        const WindowRef wa = sample_window(ds, 5, a);
        const WindowRef wb = sample_window(ds, 5, b);
        CHECK(wa.episode == wb.episode);
        CHECK(wa.offset == wb.offset);
    }

    SUBCASE("oversized horizon is rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_window(ds, s.episode_steps + 1, rng), WindowOutOfRange);
    }
}

TEST_CASE("the random controller reproduces dataset episodes bitwise") {
    const Scenario s = sc();
    const Dataset ds = generate_dataset(s, 2, 11, 1);
    // episode seeds derive from (seed, index) exactly as in generate_dataset
    Rng sub = Rng::substream(11, 1);
    const std::uint64_t ep_seed = sub.next_u64();
    MpcConfig cfg;
    const EpisodeMetrics m =
        run_controlled_episode(s, ControllerKind::Random, nullptr, cfg, s.episode_steps, ep_seed);
    REQUIRE(m.sigma.values.size() == ds.episodes[1].sigma.size());
    for (std::size_t i = 0; i < m.sigma.values.size(); ++i)
        CHECK(static_cast<float>(m.sigma.values[i]) == ds.episodes[1].sigma[i]);
}
