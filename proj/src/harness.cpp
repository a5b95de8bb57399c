#include "bnb/harness.hpp"

#include "bnb/error.hpp"
#include "bnb/json_util.hpp"

#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace bnb {

std::size_t RunReport::successes() const {
    std::size_t n = 0;
    for (const auto& t : tasks) n += t.success ? 1 : 0;
    return n;
}

double RunReport::success_rate() const {
    return tasks.empty() ? 0.0 : static_cast<double>(successes()) / static_cast<double>(tasks.size());
}

std::optional<double> RunReport::mean_time_success_only() const {
    if (successes() == 0) return std::nullopt;
    double sum = 0.0;
    for (const auto& t : tasks) sum += t.success ? t.stats.wall_time : 0.0;
    return sum / static_cast<double>(successes());
}

std::optional<double> RunReport::mean_env_actions_success_only() const {
    if (successes() == 0) return std::nullopt;
    double sum = 0.0;
    for (const auto& t : tasks) sum += t.success ? static_cast<double>(t.stats.env_actions) : 0.0;
    return sum / static_cast<double>(successes());
}

Manifest load_manifest(const std::filesystem::path& file) {
    const Json doc = jsonu::read_file(file);
    try {
        jsonu::require_object(doc, "/");
        Manifest m;
        const auto version = jsonu::require_int(doc, "schema_version", "/");
        if (version != kReportSchemaVersion) {
            throw ParseError("unsupported schema_version " + std::to_string(version), 0, "/schema_version");
        }
        const auto seed = jsonu::require_int(doc, "seed", "/");
        if (seed < 0) throw ParseError("seed must be non-negative", 0, "/seed");
        m.seed = static_cast<std::uint64_t>(seed);
        for (const auto& t : jsonu::string_list(jsonu::require(doc, "tasks", "/"), "/tasks")) {
            m.tasks.push_back(file.parent_path() / t);
        }
        return m;
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what() + " at " + e.where(), e.position(),
                         file.string() + "#" + e.where());
    }
}

TaskReport run_task(const Task& task, const SearchConfig& config, const RunOptions& options) {
    auto reasoner = options.reasoner(config.seed);
    MemoryStore memory = options.cache_dir ? MemoryStore(*options.cache_dir) : MemoryStore();
    if (options.cache_dir && std::filesystem::is_directory(*options.cache_dir)) {
        // earlier runs on this site inform decomposition
        MemoryStore cached = restore(*options.cache_dir);
        for (const auto& [url, m] : cached.records()) {
            if (task.graph.page_by_url(url)) memory.insert(m);
        }
        for (const auto& w : cached.warnings()) memory.add_warning(w);
    }
    TraceSink trace = options.trace_path ? TraceSink(*options.trace_path) : TraceSink();
    TaskReport report{task.id, false, {}, std::nullopt, std::nullopt};
    try {
        SearchResult r = search(task, config, *reasoner, memory, trace);
        report.success = r.success;
        report.stats = r.stats;
        report.answer = r.answer;
        report.error = r.error;
    } catch (const Error& e) {
        report.error = e.what();
        trace.emit("error", Json{{"message", e.what()}});
    }
    for (const auto& w : memory.warnings()) trace.emit("warning", Json{{"message", w}});
    return report;
}

RunReport run_suite(const Manifest& manifest, SearchConfig config, const RunOptions& options) {
    if (manifest.tasks.empty()) throw EmptySuite();
    config.seed = manifest.seed;
    config.validate();

    std::vector<Task> tasks;
    for (const auto& path : manifest.tasks) tasks.push_back(load_task(path));
    if (options.trace_path) std::filesystem::create_directories(*options.trace_path);

    RunReport report;
    report.config = config;
    report.tasks.resize(tasks.size());

    auto run_one = [&](std::size_t i) {
        RunOptions opts = options;
        if (options.trace_path) opts.trace_path = *options.trace_path / (tasks[i].id + ".jsonl");
        report.tasks[i] = run_task(tasks[i], config, opts);
    };

    // A shared cache directory is written in task order, so it forces one job.
    const std::size_t jobs = options.cache_dir ? 1 : std::max<std::size_t>(1, options.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) run_one(i);
        return report;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, tasks.size()); ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < tasks.size(); i = next++) {
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
    return report;
}

const std::vector<GridPoint>& default_grid() {
    static const std::vector<GridPoint> grid{{0, 1}, {1, 3}, {1, 5}, {2, 3}, {2, 5}, {3, 5}, {5, 5}};
    return grid;
}

std::vector<GridPoint> parse_grid(const std::string& text) {
    std::vector<GridPoint> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        try {
            if (x == std::string::npos) throw std::invalid_argument(item);
            std::size_t used = 0;
            const auto d = std::stoul(item.substr(0, x), &used);
            if (used != x) throw std::invalid_argument(item);
            const auto rest = item.substr(x + 1);
            const auto b = std::stoul(rest, &used);
            if (used != rest.size() || b == 0) throw std::invalid_argument(item);
            out.emplace_back(d, b);
        } catch (const std::logic_error&) {
            throw InvalidConfig("grid entry '" + item + "' is not DEPTHxBRANCH");
        }
    }
    if (out.empty()) throw InvalidConfig("grid is empty");
    return out;
}

std::vector<SweepRow> sweep(const Manifest& manifest, const SearchConfig& base, const std::vector<GridPoint>& grid,
                            const RunOptions& options) {
    std::vector<SweepRow> rows;
    for (const auto& point : grid) {
        SearchConfig cfg = base;
        cfg.depth = point.first;
        cfg.branch = point.second;
        RunOptions opts = options;
        if (options.trace_path) opts.trace_path = *options.trace_path / fmt::format("d{}_b{}", point.first, point.second);
        rows.push_back(SweepRow{point, run_suite(manifest, cfg, opts)});
    }
    return rows;
}

Json render_task_report(const TaskReport& t, bool with_time) {
    Json j{{"id", t.id}, {"success", t.success}};
    const Json stats = render_stats(t.stats, with_time);
    for (const auto& [k, v] : stats.items()) j[k] = v;
    j["answer"] = t.answer ? Json(*t.answer) : Json(nullptr);
    if (t.error) j["error"] = *t.error;
    return j;
}

Json render_report(const RunReport& r, bool with_time) {
    Json tasks = Json::array();
    for (const auto& t : r.tasks) tasks.push_back(render_task_report(t, with_time));
    Json aggregate{{"tasks", r.tasks.size()}, {"successes", r.successes()}, {"success_rate", r.success_rate()}};
    if (auto m = r.mean_env_actions_success_only()) aggregate["mean_env_actions_success_only"] = *m;
    if (with_time) {
        if (auto m = r.mean_time_success_only()) aggregate["mean_time_success_only"] = *m;
    }
    return Json{{"schema_version", kReportSchemaVersion}, {"config", render_config(r.config)},
                {"tasks", std::move(tasks)}, {"aggregate", std::move(aggregate)}};
}

Json render_sweep(const std::vector<SweepRow>& rows, bool with_time) {
    Json out = Json::array();
    for (const auto& row : rows) {
        out.push_back(Json{{"depth", row.point.first}, {"branch", row.point.second},
                           {"report", render_report(row.report, with_time)}});
    }
    return Json{{"schema_version", kReportSchemaVersion}, {"rows", std::move(out)}};
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
    std::string out = fmt::format("{:>5} {:>6} {:>8} {:>14} {:>14}\n", "depth", "branch", "SR", "env_actions", "time_s");
    for (const auto& row : rows) {
        const auto& r = row.report;
        const auto acts = r.mean_env_actions_success_only();
        const auto time = r.mean_time_success_only();
        out += fmt::format("{:>5} {:>6} {:>7.1f}% {:>14} {:>14}\n", row.point.first, row.point.second,
                           100.0 * r.success_rate(), acts ? fmt::format("{:.2f}", *acts) : "-",
                           time ? fmt::format("{:.4f}", *time) : "-");
    }
    return out;
}

} // namespace bnb
