#pragma once

#include "bnb/env.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bnb {

// What a fresh page load restores: the URL plus the tab's session history.
struct Checkpoint {
    std::string url;
    std::vector<std::string> back_urls;
    std::vector<std::string> forward_urls;

    bool operator==(const Checkpoint&) const = default;
};

// Alternating sequence view_0, action_0, view_1, ..., view_t. Index j names
// view_j and the state it was observed in.
class Trajectory {
public:
    Trajectory() = default;

    // Starts a trajectory at a freshly loaded state (index 0 is cacheable).
    static Trajectory start(const EnvState& state, const SiteGraph& graph);

    // Appends the action and the state it produced.
    void extend(const Action& action, const StepResult& result, const SiteGraph& graph);

    std::size_t size() const noexcept { return views_.size(); }
    const std::vector<PageView>& views() const noexcept { return views_; }
    const std::vector<Action>& actions() const noexcept { return actions_; }
    const PageView& view(std::size_t j) const { return views_.at(j); }
    const PageView& back() const { return views_.back(); }
    bool cacheable(std::size_t j) const { return checkpoints_.at(j).has_value(); }
    const std::optional<Checkpoint>& checkpoint(std::size_t j) const { return checkpoints_.at(j); }
    const std::string& session_digest(std::size_t j) const { return session_digests_.at(j); }

    bool operator==(const Trajectory&) const = default;

private:
    std::vector<PageView> views_;
    std::vector<Action> actions_;
    std::vector<std::optional<Checkpoint>> checkpoints_;
    std::vector<std::string> session_digests_;
};

// Checkpoint of `state` when it can be rebuilt from its URL alone: one tab,
// empty form state, reached by a navigation (`navigated`) or the root.
std::optional<Checkpoint> checkpoint_of(const EnvState& state, const SiteGraph& graph, bool navigated);

// Fresh single-tab state at the checkpoint URL. The world store of `live`
// is kept: server-side effects persist across page loads.
EnvState load_checkpoint(const EnvState& live, const SiteGraph& graph, const Checkpoint& checkpoint);

// max{c <= j : cacheable(c)}.
std::size_t nearest_checkpoint(const Trajectory& tau, std::size_t j);

struct ReplayOutcome {
    EnvState state;
    std::size_t checkpoint = 0;  // c
    std::size_t replayed = 0;    // j - c actions re-executed
};

// Load(url_c) then a_c ... a_{j-1}. Throws ReplayDivergence when the rebuilt
// browser session differs from the one recorded at index j.
ReplayOutcome replay(const EnvState& live, const SiteGraph& graph, const Trajectory& tau, std::size_t j);

// Same, restoring from an explicit cacheable index c <= j (c = 0 gives full
// re-execution from the initial page).
ReplayOutcome replay_from(const EnvState& live, const SiteGraph& graph, const Trajectory& tau, std::size_t j,
                          std::size_t c);

Json render_trajectory(const Trajectory& tau);

} // namespace bnb
