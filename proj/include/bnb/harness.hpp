#pragma once

#include "bnb/reasoner.hpp"
#include "bnb/search.hpp"
#include "bnb/task.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bnb {

inline constexpr int kReportSchemaVersion = 1;

struct TaskReport {
    std::string id;
    bool success = false;
    SearchStats stats;
    std::optional<std::string> answer;
    std::optional<std::string> error;
};

struct RunReport {
    SearchConfig config;
    std::vector<TaskReport> tasks;

    std::size_t successes() const;
    double success_rate() const;
    // Means over successful tasks only; absent when nothing succeeded.
    std::optional<double> mean_time_success_only() const;
    std::optional<double> mean_env_actions_success_only() const;
};

struct Manifest {
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> tasks;  // resolved against the manifest directory
};

Manifest load_manifest(const std::filesystem::path& file);

using ReasonerFactory = std::function<std::unique_ptr<Reasoner>(std::uint64_t seed)>;

struct RunOptions {
    ReasonerFactory reasoner = [](std::uint64_t) { return std::make_unique<ScriptedReasoner>(); };
    std::optional<std::filesystem::path> cache_dir;
    std::optional<std::filesystem::path> trace_path;  // file for run_task, directory for suites
    std::size_t jobs = 1;
};

TaskReport run_task(const Task& task, const SearchConfig& config, const RunOptions& options);

// Runs every task of the manifest with the manifest seed. Throws EmptySuite.
RunReport run_suite(const Manifest& manifest, SearchConfig config, const RunOptions& options);

using GridPoint = std::pair<std::size_t, std::size_t>;  // (depth, branch)

const std::vector<GridPoint>& default_grid();
std::vector<GridPoint> parse_grid(const std::string& text);  // "0x1,1x3,5x5"

struct SweepRow {
    GridPoint point;
    RunReport report;
};

// One suite run per grid point, every run with the same budget.
std::vector<SweepRow> sweep(const Manifest& manifest, const SearchConfig& base, const std::vector<GridPoint>& grid,
                            const RunOptions& options);

Json render_task_report(const TaskReport& report, bool with_time = true);
Json render_report(const RunReport& report, bool with_time = true);
Json render_sweep(const std::vector<SweepRow>& rows, bool with_time = true);
std::string format_sweep_table(const std::vector<SweepRow>& rows);

} // namespace bnb
