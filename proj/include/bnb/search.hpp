#pragma once

#include "bnb/background.hpp"
#include "bnb/env.hpp"
#include "bnb/memory.hpp"
#include "bnb/reasoner.hpp"
#include "bnb/replay.hpp"
#include "bnb/subtask.hpp"
#include "bnb/task.hpp"
#include "bnb/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bnb {

struct SearchConfig {
    std::size_t depth = 5;   // d
    std::size_t branch = 5;  // b
    std::size_t budget = 10; // c: main-loop environment actions
    std::optional<std::size_t> background_budget;  // defaults to budget
    double prune_epsilon = 0.1;
    std::uint64_t seed = 0;
    bool replay = true;      // false: every refocus re-executes from the root
    bool background = true;  // false: no background reasoning at all
    bool concurrent_background = false;
    std::size_t background_nodes_per_cycle = 1;

    // Throws InvalidConfig.
    void validate() const;
    std::size_t effective_background_budget() const;
    bool linear() const { return depth == 0 && branch == 1; }
};

Json render_config(const SearchConfig& config);

struct SearchNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    PageView view;
    std::optional<Action> incoming;
    std::string rationale;  // of the proposal that created the node
    double value = 0.0;
    std::size_t depth = 0;
    Trajectory prefix;
    Subtask subtask_snapshot;
    std::size_t checkpoint = 0;  // nearest cacheable index into prefix
    bool pruned = false;
    bool pre_expanded = false;
    bool focused = true;   // false until a pre-expanded node is evaluated live
    bool expanded = false;
    std::optional<std::string> answer;
    std::vector<NodeId> children;
    std::vector<Action> hints;  // deferred background proposals, best first
};

class Frontier {
public:
    struct Entry {
        NodeId node = 0;
        double value = 0.0;
        std::uint64_t ordinal = 0;

        bool operator==(const Entry&) const = default;
    };

    void push(NodeId node, double value);
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool contains(NodeId node) const;
    void erase(NodeId node);
    // Changes the value of a queued node; its ordinal is kept.
    void update(NodeId node, double value);

    // Removes and returns the entry with maximal value, smallest ordinal
    // among ties. Throws EmptyFrontier.
    Entry pop_best();

private:
    std::vector<Entry> entries_;
    std::uint64_t next_ordinal_ = 0;
};

Frontier::Entry select_frontier(Frontier& frontier);

// Drops entries with v < epsilon and entries whose (url, incoming signature)
// already occurs on an earlier-created node of `tree`; marks them pruned.
// Returns the removed node ids in frontier order.
std::vector<NodeId> prune(std::vector<SearchNode>& tree, Frontier& frontier, double epsilon);

// Adds pre-expanded children (value = relevance) and attaches deferred
// proposals as hints. Children that would repeat an existing edge or sit
// below epsilon are dropped. Returns the ids of the new nodes.
std::vector<NodeId> merge_proposals(std::vector<SearchNode>& tree, Frontier& frontier,
                                    const std::vector<BackgroundProposal>& proposals, const SiteGraph& graph,
                                    const Subtask& active, std::size_t max_depth, double epsilon);

struct SearchStats {
    std::size_t cycles = 0;               // evaluated Reason-Act-Evaluation cycles
    std::size_t env_actions = 0;          // budget units spent
    std::size_t replayed_actions = 0;     // re-executions by nearest-URL replay
    std::size_t refocus_actions = 0;      // re-executions spent on refocus in either mode
    std::size_t refocus_loads = 0;
    std::size_t background_expansions = 0;
    std::size_t subtask_updates = 0;
    std::size_t nodes = 0;
    double wall_time = 0.0;               // seconds

    bool operator==(const SearchStats&) const = default;
};

Json render_stats(const SearchStats& stats, bool with_time = true);

struct SearchResult {
    bool success = false;
    Trajectory trajectory;  // winning node's prefix, or the best node's on failure
    std::optional<std::string> answer;
    SearchStats stats;
    Plan plan;
    std::vector<SearchNode> tree;
    std::optional<std::string> error;
};

// Branch-and-browse search over the task's site. Memory is read and written
// through `memory`; events go to `trace`.
SearchResult search(const Task& task, const SearchConfig& config, Reasoner& reasoner, MemoryStore& memory,
                    TraceSink& trace);

} // namespace bnb
