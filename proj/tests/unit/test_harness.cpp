#include "bnb/error.hpp"
#include "bnb/harness.hpp"
#include "bnb/json_util.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace bnb;
using bnb::testing::fixture;

namespace {

TaskReport entry(const std::string& id, bool ok, double time, std::size_t actions) {
    TaskReport t;
    t.id = id;
    t.success = ok;
    t.stats.wall_time = time;
    t.stats.env_actions = actions;
    return t;
}

} // namespace

TEST_CASE("aggregates") {
    RunReport r;
    for (int i = 0; i < 10; ++i) r.tasks.push_back(entry("t" + std::to_string(i), i < 6, i + 1.0, 2 * i));
    CHECK(r.successes() == 6);
    CHECK(r.success_rate() == doctest::Approx(0.6));
    CHECK(*r.mean_time_success_only() == doctest::Approx((1 + 2 + 3 + 4 + 5 + 6) / 6.0));
    CHECK(*r.mean_env_actions_success_only() == doctest::Approx((0 + 2 + 4 + 6 + 8 + 10) / 6.0));

    RunReport failed;
    failed.tasks = {entry("a", false, 1, 3), entry("b", false, 2, 4)};
    CHECK(failed.success_rate() == 0.0);
    CHECK_FALSE(failed.mean_time_success_only());
    const Json doc = render_report(failed);
    CHECK_FALSE(doc["aggregate"].contains("mean_time_success_only"));
    CHECK_FALSE(doc["aggregate"].contains("mean_env_actions_success_only"));
    CHECK(doc["schema_version"] == kReportSchemaVersion);
}

TEST_CASE("empty suite") {
    const auto dir = testing::scratch_dir("empty-suite");
    jsonu::write_file(dir / "suite.json", R"({"schema_version": 1, "seed": 3, "tasks": []})");
    const auto m = load_manifest(dir / "suite.json");
    CHECK(m.seed == 3);
    CHECK_THROWS_AS(run_suite(m, SearchConfig{}, RunOptions{}), EmptySuite);
}

TEST_CASE("manifest paths resolve against the manifest") {
    const auto m = load_manifest(fixture("suites/backtrack.json"));
    CHECK(m.tasks.size() == 10);
    CHECK(m.seed == 7);
    for (const auto& t : m.tasks) CHECK(std::filesystem::exists(t));
}

TEST_CASE("task files report positions") {
    const auto dir = testing::scratch_dir("bad-task");
    jsonu::write_file(dir / "t.json", R"({"schema_version": 1, "id": "x", "intent": 5, "site": "s.json"})");
    try {
        load_task(dir / "t.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.where().find("t.json") != std::string::npos);
        CHECK(e.where().find("intent") != std::string::npos);
    }
    jsonu::write_file(dir / "u.json", "{\n  \"id\": ");
    try {
        load_task(dir / "u.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() > 0);
    }
}

TEST_CASE("run_task flags") {
    const auto task = load_task(fixture("tasks/bt08_bulk.json"));
    const auto base = run_task(task, SearchConfig{}, RunOptions{});
    SearchConfig no_replay;
    no_replay.replay = false;
    const auto root = run_task(task, no_replay, RunOptions{});
    CHECK(base.success);
    CHECK(root.success);
    CHECK(root.stats.replayed_actions == 0);
    CHECK(root.stats.refocus_actions > base.stats.refocus_actions);

    SearchConfig no_bg;
    no_bg.background = false;
    CHECK(run_task(task, no_bg, RunOptions{}).stats.background_expansions == 0);

    const auto mini = run_task(load_task(fixture("tasks/miniadmin.json")), SearchConfig{}, RunOptions{});
    CHECK(mini.success);
    CHECK_FALSE(mini.error);
}

TEST_CASE("run_task writes the trace and fills the cache") {
    const auto dir = testing::scratch_dir("run-task");
    RunOptions opts;
    opts.trace_path = dir / "trace.jsonl";
    opts.cache_dir = dir / "cache";
    const auto r = run_task(load_task(fixture("tasks/miniadmin.json")), SearchConfig{}, opts);
    CHECK(r.success);
    const auto trace = testing::read_trace(dir / "trace.jsonl");
    REQUIRE_FALSE(trace.empty());
    CHECK(trace.front()["event"] == "start");
    CHECK(trace.back()["event"] == "end");
    for (std::size_t i = 0; i < trace.size(); ++i) CHECK(trace[i]["seq"] == i);

    const auto store = restore(dir / "cache");
    CHECK(store.warnings().empty());
    bool reports = false;
    for (const auto& s : store.summaries_for_decomposition()) {
        reports = reports || s.url == "http://shop.test/reports";
    }
    CHECK(reports);
}

TEST_CASE("a cached run decomposes with memory") {
    const auto dir = testing::scratch_dir("cached-run");
    RunOptions opts;
    opts.cache_dir = dir;
    const auto task = load_task(fixture("tasks/miniadmin.json"));
    CHECK(run_task(task, SearchConfig{}, opts).success);
    opts.trace_path = dir / "second.jsonl";
    std::filesystem::create_directories(dir);
    const auto again = run_task(task, SearchConfig{}, opts);
    CHECK(again.success);
    const auto trace = testing::read_trace(dir / "second.jsonl");
    CHECK(testing::events(trace, "decompose")[0]["memory_summaries"].get<int>() > 0);
}

TEST_CASE("grids") {
    const std::vector<GridPoint> expected{{0, 1}, {1, 3}, {1, 5}, {2, 3}, {2, 5}, {3, 5}, {5, 5}};
    CHECK(default_grid() == expected);
    CHECK(parse_grid("0x1,5x5") == std::vector<GridPoint>{{0, 1}, {5, 5}});
    CHECK_THROWS_AS(parse_grid("0x0"), InvalidConfig);
    CHECK_THROWS_AS(parse_grid("3"), InvalidConfig);
    CHECK_THROWS_AS(parse_grid(""), InvalidConfig);
}

TEST_CASE("sweep keeps the budget and runs linear mode at (0,1)") {
    const auto m = load_manifest(fixture("suites/backtrack.json"));
    SearchConfig base;
    base.budget = 10;
    const auto rows = sweep(m, base, {{0, 1}, {5, 5}}, RunOptions{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].report.config.linear());
    CHECK(rows[1].report.config.depth == 5);
    for (const auto& row : rows) {
        CHECK(row.report.config.budget == 10);
        CHECK(row.report.tasks.size() == 10);
    }
    for (const auto& t : rows[0].report.tasks) CHECK(t.stats.background_expansions == 0);
    const auto table = format_sweep_table(rows);
    CHECK(table.find("depth") != std::string::npos);
    CHECK(render_sweep(rows).size() == 2);
}

TEST_CASE("parallel suite equals sequential suite") {
    const auto m = load_manifest(fixture("suites/backtrack.json"));
    RunOptions seq;
    RunOptions par;
    par.jobs = 4;
    const auto a = render_report(run_suite(m, SearchConfig{}, seq), false);
    const auto b = render_report(run_suite(m, SearchConfig{}, par), false);
    CHECK(a == b);
}
