// Command-line front end: run one task, a suite, or a depth x branch sweep.

#include "bnb/error.hpp"
#include "bnb/harness.hpp"
#include "bnb/json_util.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <iostream>

namespace {

struct Options {
    std::size_t depth = 5;
    std::size_t branch = 5;
    std::size_t budget = 10;
    std::optional<std::size_t> bg_budget;
    double epsilon = 0.1;
    std::optional<std::uint64_t> seed;
    bool no_replay = false;
    bool no_background = false;
    bool concurrent = false;
    std::string reasoner = "scripted";
    std::string endpoint;
    int retries = 2;
    int timeout_ms = 30000;
    std::string cache_dir;
    std::string trace;
    std::string report;
    std::size_t jobs = 1;
    std::string grid;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--depth", o.depth, "maximum node depth d");
    cmd->add_option("--branch", o.branch, "proposals per expansion b")->check(CLI::PositiveNumber);
    cmd->add_option("--budget", o.budget, "main-loop environment actions c")->check(CLI::PositiveNumber);
    cmd->add_option("--bg-budget", o.bg_budget, "background pre-expansions (default: budget)");
    cmd->add_option("--epsilon", o.epsilon, "prune threshold")->check(CLI::Range(0.0, 0.999999));
    cmd->add_option("--seed", o.seed, "random seed (suites default to the manifest seed)");
    cmd->add_flag("--no-replay", o.no_replay, "refocus by re-executing from the initial page");
    cmd->add_flag("--no-background", o.no_background, "disable background reasoning");
    cmd->add_flag("--concurrent-background", o.concurrent, "run background reasoning on a worker thread");
    cmd->add_option("--reasoner", o.reasoner, "scripted or remote")->check(CLI::IsMember({"scripted", "remote"}));
    cmd->add_option("--endpoint", o.endpoint, "remote reasoner URL, e.g. http://127.0.0.1:8080/reason");
    cmd->add_option("--retries", o.retries, "remote retries after a transport failure")->check(CLI::NonNegativeNumber);
    cmd->add_option("--timeout-ms", o.timeout_ms, "remote request timeout")->check(CLI::PositiveNumber);
    cmd->add_option("--cache-dir", o.cache_dir, "page memory cache directory");
    cmd->add_option("--trace", o.trace, "trace file (run) or directory (suite, sweep)");
    cmd->add_option("--report", o.report, "write the JSON report here");
    cmd->add_option("--jobs", o.jobs, "parallel tasks in a suite")->check(CLI::PositiveNumber);
}

bnb::SearchConfig make_config(const Options& o) {
    bnb::SearchConfig c;
    c.depth = o.depth;
    c.branch = o.branch;
    c.budget = o.budget;
    c.background_budget = o.bg_budget;
    c.prune_epsilon = o.epsilon;
    c.seed = o.seed.value_or(0);
    c.replay = !o.no_replay;
    c.background = !o.no_background;
    c.concurrent_background = o.concurrent;
    c.validate();
    return c;
}

bnb::RunOptions make_run_options(const Options& o) {
    bnb::RunOptions r;
    if (o.reasoner == "remote") {
        if (o.endpoint.empty()) throw bnb::InvalidConfig("--reasoner remote needs --endpoint");
        bnb::RemoteConfig rc;
        rc.endpoint = o.endpoint;
        rc.retries = o.retries;
        rc.timeout = std::chrono::milliseconds(o.timeout_ms);
        r.reasoner = [rc](std::uint64_t seed) mutable {
            rc.seed = seed;
            return std::make_unique<bnb::RemoteReasoner>(rc);
        };
    }
    if (!o.cache_dir.empty()) r.cache_dir = o.cache_dir;
    if (!o.trace.empty()) r.trace_path = o.trace;
    r.jobs = o.jobs;
    return r;
}

void write_report(const Options& o, const bnb::Json& doc) {
    if (!o.report.empty()) bnb::jsonu::write_file(o.report, doc.dump(2) + "\n");
}

void print_suite(const bnb::RunReport& r) {
    for (const auto& t : r.tasks) {
        fmt::print("{:<28} {:<7} cycles={:<3} env_actions={:<3} refocus_actions={:<3} background={}{}\n", t.id,
                   t.success ? "success" : "fail", t.stats.cycles, t.stats.env_actions, t.stats.refocus_actions,
                   t.stats.background_expansions, t.error ? "  error: " + *t.error : "");
    }
    fmt::print("SR {}/{} = {:.1f}%\n", r.successes(), r.tasks.size(), 100.0 * r.success_rate());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branch-and-browse web agent search over simulated sites"};
    app.require_subcommand(1);

    Options run_opts, suite_opts, sweep_opts;
    std::string task_file, suite_manifest, sweep_manifest;

    auto* run = app.add_subcommand("run", "search one task");
    run->add_option("task", task_file, "task file")->required();
    add_common(run, run_opts);

    auto* suite = app.add_subcommand("suite", "run every task of a manifest");
    suite->add_option("manifest", suite_manifest, "suite manifest")->required();
    add_common(suite, suite_opts);

    auto* sweep = app.add_subcommand("sweep", "run a suite over a grid of (depth, branch)");
    sweep->add_option("manifest", sweep_manifest, "suite manifest")->required();
    add_common(sweep, sweep_opts);
    sweep->add_option("--grid", sweep_opts.grid, "comma-separated DEPTHxBRANCH list (default 0x1,...,5x5)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto task = bnb::load_task(task_file);
            auto config = make_config(run_opts);
            const auto report = bnb::run_task(task, config, make_run_options(run_opts));
            bnb::RunReport r{config, {report}};
            write_report(run_opts, bnb::render_report(r));
            print_suite(r);
            if (report.answer) fmt::print("answer: {}\n", *report.answer);
            return report.success ? 0 : 1;
        }
        if (suite->parsed()) {
            auto manifest = bnb::load_manifest(suite_manifest);
            if (suite_opts.seed) manifest.seed = *suite_opts.seed;
            const auto r = bnb::run_suite(manifest, make_config(suite_opts), make_run_options(suite_opts));
            write_report(suite_opts, bnb::render_report(r));
            print_suite(r);
            return 0;
        }
        auto manifest = bnb::load_manifest(sweep_manifest);
        if (sweep_opts.seed) manifest.seed = *sweep_opts.seed;
        const auto grid = sweep_opts.grid.empty() ? bnb::default_grid() : bnb::parse_grid(sweep_opts.grid);
        const auto rows = bnb::sweep(manifest, make_config(sweep_opts), grid, make_run_options(sweep_opts));
        write_report(sweep_opts, bnb::render_sweep(rows));
        fmt::print("{}", bnb::format_sweep_table(rows));
        return 0;
    } catch (const bnb::Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
}
