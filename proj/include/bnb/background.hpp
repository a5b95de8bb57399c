#pragma once

#include "bnb/env.hpp"
#include "bnb/reasoner.hpp"
#include "bnb/replay.hpp"
#include "bnb/subtask.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bnb {

using NodeId = std::size_t;

// One unexplored frontier node as seen by the background worker.
struct FrontierTarget {
    NodeId node = 0;
    double value = 0.0;
    std::uint64_t ordinal = 0;
    Trajectory prefix;
    NodeContext context;
};

// Immutable input of one background step. `live` is a copy; only its world
// store is used, to rebuild node states on a scratch environment.
struct BackgroundSnapshot {
    std::vector<FrontierTarget> targets;
    EnvState live;
    std::string intent;
    Subtask subtask;
    bool final_subtask = false;
    std::vector<std::string> inputs;
    std::size_t branch = 1;
};

struct BackgroundProposal {
    NodeId node = 0;
    ActionProposal proposal;
    bool pre_expandable = false;
    std::optional<StepResult> simulated;  // present iff pre_expandable

    const PageView* simulated_view() const { return simulated ? &simulated->view : nullptr; }
};

struct BackgroundOutcome {
    std::vector<BackgroundProposal> proposals;
    std::vector<NodeId> visited;
    std::size_t expansions = 0;  // background budget units spent
    std::vector<std::string> skipped;
};

// CLICK on an element of the context that carries an explicit href.
bool is_pre_expandable(const Action& action, const NodeContext& ctx);

// Visits up to `max_nodes` targets in descending value (FIFO on ties), asks
// the reasoner for proposals and simulates link-follows on a scratch copy.
// A simulation is kept only when it lands on the href without touching the
// world store; each one costs a budget unit whether kept or not.
BackgroundOutcome background_step(const BackgroundSnapshot& snapshot, const SiteGraph& graph, Reasoner& reasoner,
                                  std::size_t budget, std::size_t max_nodes = 1);

} // namespace bnb
