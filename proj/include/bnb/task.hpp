#pragma once

#include "bnb/env.hpp"
#include "bnb/subtask.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bnb {

inline constexpr int kTaskSchemaVersion = 1;

struct Task {
    std::string id;
    std::string intent;
    std::filesystem::path site_path;
    SiteGraph graph;
    std::vector<SubtaskHint> hints;
    std::vector<std::string> inputs;  // text the agent may type
};

// The site path is resolved against the task file's directory. A "goal"
// field in the task replaces the site's own goal.
Task load_task(const std::filesystem::path& file);
Task parse_task(const Json& doc, const std::filesystem::path& base_dir);

} // namespace bnb
