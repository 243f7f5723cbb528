#include <doctest.h>

#include <filesystem>

#include "scoutrl/config.hpp"
#include "scoutrl/io.hpp"
#include "scoutrl/pipeline.hpp"

using namespace scoutrl;

TEST_SUITE_BEGIN("config");

TEST_CASE("empty config carries the documented defaults") {
    const RunConfig c = parse_config("");
    CHECK(c.gamma == 0.99);
    CHECK(c.batch == 256);
    CHECK(c.length_x == 2000.0);
    CHECK(c.resolution == 20.0);
    CHECK(c.coverage_radius == 100.0);
    CHECK(c.d_max == 15.0);
    CHECK(c.tau == 1.0);
    CHECK(c.beta == 0.2);
    CHECK(c.newton_iters == 3);
    CHECK(c.pcg_iters == 8);
    CHECK(c.variance_growth == 0.002);
    CHECK(c.variance_min == 0.01);
    CHECK(c.horizon == 5);
    CHECK(c.staleness_weight == 0.1);
    CHECK(c.w_service == 5.0);
    CHECK(c.w_explore == 0.5);
    CHECK(c.w_coord == 1.0);
    CHECK(c.episodes == 200);
    CHECK(c.steps == 200);
    CHECK(c.buffer_capacity == 10000);
    CHECK(c.tau_soft == 0.005);
    CHECK(c.learning_rate == 3e-4);
    CHECK(c.learning_starts == 100);
    CHECK(c.hidden_units == 256);
    CHECK(c.sampling_trials == 100);
    CHECK(c.request_prob == 0.05);
    CHECK(c.hotspot_drift_rate == 1.0);
    CHECK(c.hotspot_drift_bound == 75.0);
}

TEST_CASE("file values and overrides compose in order") {
    const std::string path = "/tmp/scoutrl_test_config.txt";
    write_text_file(path, "# comment line\nd_max = 10\nbatch = 64  # trailing comment\n\n");
    SUBCASE("file values replace defaults") {
        const RunConfig c = load_config(path);
        CHECK(c.d_max == 10.0);
        CHECK(c.batch == 64);
    }
    SUBCASE("overrides win over the file") {
        const RunConfig c = load_config(path, {"d_max=15"});
        CHECK(c.d_max == 15.0);
        CHECK(c.batch == 64);
    }
}

TEST_CASE("config validation names the offending field") {
    SUBCASE("warm-start episodes must stay below the total") {
        RunConfig c;
        c.warmstart_episodes = 300;
        c.episodes = 200;
        CHECK_THROWS_WITH_AS(c.validate(),
                             doctest::Contains("warmstart_episodes"), std::invalid_argument);
    }
    SUBCASE("probabilities are range-checked") {
        RunConfig c;
        c.p_loss = 1.0;
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("p_loss"), std::invalid_argument);
    }
    SUBCASE("strategy names are checked") {
        RunConfig c;
        c.strategy = "teleport";
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("parse errors carry line numbers and unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("tau = 1\nbogus_key = 3\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("\n\nnot a pair\n"), doctest::Contains("line 3"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config("tau = abc\n"), doctest::Contains("tau"),
                         std::invalid_argument);
}

TEST_CASE("resolved text round-trips to the same configuration") {
    RunConfig c;
    c.d_max = 12.5;
    c.strategy = "ucb";
    c.seeds = {4, 9};
    c.transfer_belief = false;
    const RunConfig back = parse_config(c.resolved_text());
    CHECK(back.hash() == c.hash());
    CHECK(back.d_max == 12.5);
    CHECK(back.strategy == "ucb");
    CHECK(back.seeds == std::vector<uint64_t>{4, 9});
    CHECK_FALSE(back.transfer_belief);
}

TEST_CASE("manifest embeds and round-trips the resolved config") {
    RunConfig c;
    c.batch = 128;
    const std::string json = manifest_json(c, "train", {1, 2});
    const RunConfig back = config_from_manifest(json);
    CHECK(back.hash() == c.hash());
    CHECK(back.batch == 128);
}

TEST_CASE("desk-scale and planning-comparison presets") {
    RunConfig c;
    apply_desk_scale(c);
    CHECK(c.make_grid().cells_x == 40);
    CHECK(c.steps == 100);
    CHECK(c.episodes == 80);
    c.validate();

    RunConfig a;
    apply_appendix_scenario(a, false);
    CHECK(a.make_grid().cells_x == 40);
    CHECK(a.hotspots_min == 2);
    CHECK(a.hotspots_max == 2);
    CHECK(a.seeds.size() == 10);
    a.validate();

    RunConfig full;
    apply_appendix_scenario(full, true);
    CHECK(full.make_grid().cells_x == 100);
}

TEST_CASE("grid CSVs round-trip and embed the hash") {
    const GridSpec grid(100.0, 80.0, 20.0);  // 5x4
    Field values(grid.cell_count());
    for (int i = 0; i < grid.cell_count(); ++i) values[i] = 0.1 * i - 0.7;
    const std::string path = "/tmp/scoutrl_test_grid.csv";
    write_grid_csv(path, values, grid, 12345u);
    const std::string text = read_text_file(path);
    CHECK(text.find("# config=12345") == 0);
    const Field back = read_grid_csv(path, grid);
    CHECK((back - values).norm() == 0.0);
}

TEST_CASE("identical runs serialize byte-identically") {
    RunConfig c;
    RunMetrics metrics;
    metrics.episode_rewards = {1.5, 2.25, 3.125};
    metrics.episode_mean_variance = {0.9, 0.8, 0.7};
    metrics.episode_pearson = {0.0, 0.5, 0.25};
    metrics.episode_wall_clock = {1.0, 2.0, 3.0};  // must not leak into the file
    const std::string d1 = "/tmp/scoutrl_metrics_a", d2 = "/tmp/scoutrl_metrics_b";
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
    write_metrics(d1, "run", metrics, c, 3, 0);
    metrics.episode_wall_clock = {9.0, 9.0, 9.0};
    write_metrics(d2, "run", metrics, c, 3, 0);
    CHECK(read_text_file(d1 + "/run.csv") == read_text_file(d2 + "/run.csv"));
    CHECK(read_text_file(d1 + "/run.manifest.json") == read_text_file(d2 + "/run.manifest.json"));
}

TEST_SUITE_END();
