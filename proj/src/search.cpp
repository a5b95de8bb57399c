#include "bnb/search.hpp"

#include "bnb/error.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <memory>
#include <set>

namespace bnb {

// ── configuration ────────────────────────────────────────────────────────────

void SearchConfig::validate() const {
    if (branch < 1) throw InvalidConfig("branch factor must be at least 1");
    if (budget < 1) throw InvalidConfig("budget must be at least 1");
    if (!(prune_epsilon >= 0.0 && prune_epsilon < 1.0)) throw InvalidConfig("epsilon must lie in [0, 1)");
    if (background_nodes_per_cycle < 1) throw InvalidConfig("background nodes per cycle must be at least 1");
}

std::size_t SearchConfig::effective_background_budget() const {
    if (!background) return 0;
    return background_budget.value_or(budget);
}

Json render_config(const SearchConfig& c) {
    return Json{{"depth", c.depth},
                {"branch", c.branch},
                {"budget", c.budget},
                {"background_budget", c.effective_background_budget()},
                {"epsilon", c.prune_epsilon},
                {"seed", c.seed},
                {"replay", c.replay},
                {"background", c.background},
                {"concurrent_background", c.concurrent_background}};
}

Json render_stats(const SearchStats& s, bool with_time) {
    Json j{{"cycles", s.cycles},
           {"env_actions", s.env_actions},
           {"replayed_actions", s.replayed_actions},
           {"refocus_actions", s.refocus_actions},
           {"refocus_loads", s.refocus_loads},
           {"background_expansions", s.background_expansions},
           {"subtask_updates", s.subtask_updates},
           {"nodes", s.nodes}};
    if (with_time) j["wall_time"] = s.wall_time;
    return j;
}

// ── frontier ─────────────────────────────────────────────────────────────────

void Frontier::push(NodeId node, double value) {
    entries_.push_back(Entry{node, value, next_ordinal_++});
}

bool Frontier::contains(NodeId node) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.node == node; });
}

void Frontier::update(NodeId node, double value) {
    for (auto& e : entries_) {
        if (e.node == node) e.value = value;
    }
}

void Frontier::erase(NodeId node) {
    std::erase_if(entries_, [&](const Entry& e) { return e.node == node; });
}

Frontier::Entry Frontier::pop_best() {
    if (entries_.empty()) throw EmptyFrontier();
    auto best = entries_.begin();
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (it->value > best->value || (it->value == best->value && it->ordinal < best->ordinal)) best = it;
    }
    Entry out = *best;
    entries_.erase(best);
    return out;
}

Frontier::Entry select_frontier(Frontier& frontier) {
    return frontier.pop_best();
}

namespace {

bool same_edge(const SearchNode& a, const std::string& url, const std::string& signature) {
    return a.incoming && a.view.url == url && action_signature(*a.incoming) == signature;
}

bool repeats_earlier(const std::vector<SearchNode>& tree, NodeId id) {
    const SearchNode& n = tree[id];
    if (!n.incoming) return false;
    const std::string sig = action_signature(*n.incoming);
    for (NodeId k = 0; k < id; ++k) {
        if (same_edge(tree[k], n.view.url, sig)) return true;
    }
    return false;
}

} // namespace

std::vector<NodeId> prune(std::vector<SearchNode>& tree, Frontier& frontier, double epsilon) {
    std::vector<NodeId> removed;
    for (const auto& e : frontier.entries()) {
        if (e.value < epsilon || repeats_earlier(tree, e.node)) removed.push_back(e.node);
    }
    for (NodeId id : removed) {
        frontier.erase(id);
        tree[id].pruned = true;
    }
    return removed;
}

std::vector<NodeId> merge_proposals(std::vector<SearchNode>& tree, Frontier& frontier,
                                    const std::vector<BackgroundProposal>& proposals, const SiteGraph& graph,
                                    const Subtask& active, std::size_t max_depth, double epsilon) {
    std::vector<NodeId> added;
    for (const auto& bp : proposals) {
        if (bp.node >= tree.size()) continue;
        const Action& action = bp.proposal.action;
        if (!bp.pre_expandable) {
            auto& hints = tree[bp.node].hints;
            if (std::find(hints.begin(), hints.end(), action) == hints.end()) hints.push_back(action);
            continue;
        }
        const SearchNode& parent = tree[bp.node];
        if (parent.depth + 1 > max_depth || bp.proposal.relevance < epsilon) continue;
        const std::string sig = action_signature(action);
        const std::string& url = bp.simulated->view.url;
        const bool known = std::any_of(tree.begin(), tree.end(), [&](const SearchNode& n) {
            return same_edge(n, url, sig) || (n.parent == bp.node && n.incoming && *n.incoming == action);
        });
        if (known) continue;

        SearchNode child;
        child.id = tree.size();
        child.parent = bp.node;
        child.view = bp.simulated->view;
        child.incoming = action;
        child.rationale = bp.proposal.rationale;
        child.value = bp.proposal.relevance;
        child.depth = parent.depth + 1;
        child.prefix = parent.prefix;
        child.prefix.extend(action, *bp.simulated, graph);
        child.checkpoint = nearest_checkpoint(child.prefix, child.prefix.size() - 1);
        child.subtask_snapshot = active;
        child.pre_expanded = true;
        child.focused = false;
        tree[bp.node].children.push_back(child.id);
        frontier.push(child.id, child.value);
        added.push_back(child.id);
        tree.push_back(std::move(child));
    }
    return added;
}

// ── engine ───────────────────────────────────────────────────────────────────

namespace {

Json render_proposal(const ActionProposal& p) {
    return Json{{"signature", action_signature(p.action)}, {"relevance", p.relevance}};
}

std::string describe_result(const StepResult& r, const Action& action, const std::string& from_url) {
    if (const auto* stop = action.get_if<act::Stop>()) return "answered: " + stop->answer;
    if (!r.matched) return "no effect";
    if (r.navigated) return "navigated to " + r.view.url;
    if (r.view.url != from_url) return "page changed to " + r.view.url;
    return "page updated";
}

bool applicable(const Action& action, const PageView& view, const SiteGraph& graph) {
    if (!is_well_formed(action)) return false;
    if (const auto* d = action.get_if<act::Drag>()) return view.find_element(d->source) && view.find_element(d->target);
    if (action.kind() == ActionKind::PressKey) return true;
    if (auto ref = action.element()) return view.find_element(*ref) != nullptr;
    if (const auto* n = action.get_if<act::Navigate>()) return graph.page_by_url(n->url) != nullptr;
    if (const auto* t = action.get_if<act::TabSelect>()) return t->id < view.tab_count;
    if (const auto* t = action.get_if<act::TabClose>()) return t->id < view.tab_count;
    return true;
}

class Engine {
public:
    Engine(const Task& task, const SearchConfig& config, Reasoner& reasoner, MemoryStore& memory, TraceSink& trace)
        : task_(task), graph_(task.graph), cfg_(config), reasoner_(reasoner), memory_(memory), trace_(trace),
          bg_budget_left_(config.effective_background_budget()) {}

    SearchResult run();

private:
    bool budget_left() const { return stats_.env_actions < cfg_.budget; }
    MemoryObjective objective() const { return {task_.intent, plan_.active().objective}; }

    void start();
    void run_tree();
    void run_linear();

    Evaluation evaluate(NodeId id);
    void advance(const Evaluation& eval, const PageView& view);
    void remember(const PageView& source, const ActionProposal& p, const std::string& result, bool effective,
                  const Evaluation& eval);
    void refocus(NodeId id);
    NodeId add_child(NodeId parent, const ActionProposal& p, const StepResult& r);
    NodeId execute(NodeId parent, const ActionProposal& p);
    bool focus(NodeId id);
    std::vector<ActionProposal> proposals_for(NodeId id);
    bool expand(NodeId id);
    void refine(NodeId around);
    void rescore();
    void prune_round();
    void background_round();
    void absorb(BackgroundOutcome outcome, const std::string& before, const std::string& after);
    BackgroundSnapshot snapshot();
    void check_goal(NodeId id);

    const Task& task_;
    const SiteGraph& graph_;
    SearchConfig cfg_;
    Reasoner& reasoner_;
    MemoryStore& memory_;
    TraceSink& trace_;

    EnvState live_;
    std::vector<SearchNode> tree_;
    Frontier frontier_;
    Plan plan_;
    SearchStats stats_;
    std::size_t bg_budget_left_;
    std::set<NodeId> bg_visited_;
    std::optional<NodeId> winner_;
    bool linear_ = false;

    std::unique_ptr<Reasoner> bg_reasoner_;
    std::future<BackgroundOutcome> pending_;
    std::string pending_digest_;
};

SearchResult Engine::run() {
    cfg_.validate();
    const auto t0 = std::chrono::steady_clock::now();
    trace_.emit("start", Json{{"schema_version", kTraceSchemaVersion}, {"task", task_.id}, {"intent", task_.intent},
                              {"site", graph_.name}, {"config", render_config(cfg_)}});
    SearchResult result;
    try {
        start();
        if (!winner_) {
            if (cfg_.linear()) {
                run_linear();
            } else {
                run_tree();
            }
        }
    } catch (const Error& e) {
        if (stats_.cycles == 0) throw;
        result.error = e.what();
        trace_.emit("error", Json{{"message", e.what()}});
    }
    if (pending_.valid()) {
        try {
            pending_.get();
        } catch (const Error&) {
        }
    }

    result.success = winner_.has_value() && !result.error;
    NodeId best = 0;
    if (result.success) {
        best = *winner_;
    } else {
        for (const auto& n : tree_) {
            if (n.value > tree_[best].value) best = n.id;
        }
    }
    if (!tree_.empty()) {
        result.trajectory = tree_[best].prefix;
        result.answer = tree_[best].answer;
    }
    stats_.nodes = tree_.size();
    stats_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.stats = stats_;
    result.plan = plan_;
    result.tree = std::move(tree_);
    trace_.emit("end", Json{{"success", result.success}, {"stats", render_stats(stats_, false)}});
    return result;
}

void Engine::start() {
    live_ = reset(graph_);
    const auto summaries = memory_.summaries_for_decomposition();
    plan_ = decompose(task_.intent, task_.hints, summaries, reasoner_);
    Json subtasks = Json::array();
    for (const auto& u : plan_.subtasks) subtasks.push_back(render_subtask(u));
    trace_.emit("decompose", Json{{"subtasks", std::move(subtasks)}, {"memory_summaries", summaries.size()}});

    SearchNode root;
    root.view = observe(live_, graph_);
    root.prefix = Trajectory::start(live_, graph_);
    root.subtask_snapshot = plan_.active();
    tree_.push_back(std::move(root));
    const Evaluation e = evaluate(0);
    tree_[0].value = e.score;
    check_goal(0);
    if (!winner_) advance(e, tree_[0].view);
    linear_ = cfg_.linear();
    if (!linear_ && cfg_.concurrent_background && bg_budget_left_ > 0) bg_reasoner_ = reasoner_.new_session();
}

void Engine::run_tree() {
    frontier_.push(0, tree_[0].value);
    while (!winner_) {
        if (frontier_.empty()) {
            trace_.emit("frontier_empty");
            break;
        }
        if (!budget_left()) {
            trace_.emit("budget_exhausted", Json{{"env_actions", stats_.env_actions}});
            break;
        }
        const auto entry = select_frontier(frontier_);
        SearchNode& node = tree_[entry.node];
        trace_.emit("select", Json{{"node", entry.node}, {"value", entry.value}, {"url", node.view.url},
                                   {"depth", node.depth}, {"pre_expanded", node.pre_expanded}});
        if (node.pre_expanded && !node.focused) {
            if (focus(entry.node)) break;
            if (!tree_[entry.node].pruned) frontier_.push(entry.node, tree_[entry.node].value);
        } else if (node.depth >= cfg_.depth) {
            trace_.emit("retire", Json{{"node", entry.node}});
            continue;
        } else if (expand(entry.node)) {
            break;
        }
        refine(entry.node);
        prune_round();
        background_round();
    }
}

void Engine::run_linear() {
    NodeId cur = 0;
    while (!winner_) {
        if (!budget_left()) {
            trace_.emit("budget_exhausted", Json{{"env_actions", stats_.env_actions}});
            break;
        }
        tree_[cur].expanded = true;
        auto proposals = proposals_for(cur);
        if (proposals.empty()) {
            trace_.emit("no_proposal", Json{{"node", cur}});
            break;
        }
        cur = execute(cur, proposals.front());
        if (winner_) break;
        refine(cur);
    }
}

Evaluation Engine::evaluate(NodeId id) {
    const SearchNode& n = tree_[id];
    Evaluation e = clamped(reasoner_.evaluate(EvaluateRequest{task_.intent, n.view, plan_.active(), plan_.final_active()}));
    trace_.emit("evaluate", Json{{"node", id}, {"score", e.score}, {"subtask_done", e.subtask_done},
                                 {"task_done_hint", e.task_done_hint}, {"subtask", plan_.active_index}});
    return e;
}

void Engine::advance(const Evaluation& eval, const PageView& view) {
    const std::size_t before = plan_.active_index;
    const bool was_complete = plan_.complete;
    plan_ = check_and_advance(std::move(plan_), eval, view);
    if (plan_.active_index != before || plan_.complete != was_complete) {
        trace_.emit("advance", Json{{"from", before}, {"to", plan_.active_index}, {"complete", plan_.complete}});
    }
}

void Engine::remember(const PageView& source, const ActionProposal& p, const std::string& result, bool effective,
                      const Evaluation& eval) {
    const PageMemory& m =
        memory_.record_cycle(CycleInput{source, objective(), p.rationale, p.action, result, effective, eval},
                             cfg_.prune_epsilon);
    const std::string sig = action_signature(p.action);
    trace_.emit("memory", Json{{"url", source.url}, {"signature", sig},
                               {"relevance", std::string(relevance_name(m.find(sig)->relevance))}});
}

void Engine::refocus(NodeId id) {
    const Trajectory& prefix = tree_[id].prefix;
    const std::size_t j = prefix.size() - 1;
    if (session_hash(live_) == prefix.session_digest(j)) return;
    ReplayOutcome out = cfg_.replay ? replay(live_, graph_, prefix, j) : replay_from(live_, graph_, prefix, j, 0);
    live_ = std::move(out.state);
    ++stats_.refocus_loads;
    stats_.refocus_actions += out.replayed;
    if (cfg_.replay) stats_.replayed_actions += out.replayed;
    trace_.emit("refocus", Json{{"node", id}, {"j", j}, {"c", out.checkpoint}, {"replayed", out.replayed},
                                {"mode", cfg_.replay ? "nearest" : "root"}});
}

NodeId Engine::add_child(NodeId parent, const ActionProposal& p, const StepResult& r) {
    SearchNode child;
    child.id = tree_.size();
    child.parent = parent;
    child.view = r.view;
    child.incoming = p.action;
    child.rationale = p.rationale;
    child.depth = tree_[parent].depth + 1;
    child.prefix = tree_[parent].prefix;
    child.prefix.extend(p.action, r, graph_);
    child.checkpoint = nearest_checkpoint(child.prefix, child.prefix.size() - 1);
    child.subtask_snapshot = plan_.active();
    if (const auto* stop = p.action.get_if<act::Stop>()) child.answer = stop->answer;
    tree_[parent].children.push_back(child.id);
    tree_.push_back(std::move(child));
    return tree_.back().id;
}

NodeId Engine::execute(NodeId parent, const ActionProposal& p) {
    refocus(parent);
    const PageView source = tree_[parent].view;
    StepResult r = step(live_, graph_, p.action);
    live_ = r.state;
    ++stats_.env_actions;
    ++stats_.cycles;
    const std::string result = describe_result(r, p.action, source.url);
    trace_.emit("execute", Json{{"node", parent}, {"url", source.url}, {"signature", action_signature(p.action)},
                                {"matched", r.matched}, {"navigated", r.navigated}, {"landed", r.view.url},
                                {"env_actions", stats_.env_actions}});

    const NodeId id = add_child(parent, p, r);
    const Evaluation e = evaluate(id);
    tree_[id].value = e.score;
    remember(source, p, result, r.matched, e);
    check_goal(id);
    if (winner_) return id;
    advance(e, r.view);

    const bool terminal = !r.matched || p.action.kind() == ActionKind::Stop;
    if (linear_) return id;
    if (terminal) {
        tree_[id].pruned = true;
        trace_.emit("prune", Json{{"nodes", {id}}, {"reason", "dead_end"}});
    } else {
        frontier_.push(id, e.score);
    }
    return id;
}

void Engine::check_goal(NodeId id) {
    if (goal_check(graph_, live_, tree_[id].answer)) {
        winner_ = id;
        trace_.emit("goal", Json{{"node", id}, {"url", tree_[id].view.url}, {"depth", tree_[id].depth}});
    }
}

bool Engine::focus(NodeId id) {
    refocus(id);
    ++stats_.cycles;
    SearchNode& n = tree_[id];
    n.focused = true;
    trace_.emit("focus", Json{{"node", id}, {"url", n.view.url}});
    const Evaluation e = evaluate(id);
    tree_[id].value = e.score;
    const SearchNode& node = tree_[id];
    remember(tree_[*node.parent].view, ActionProposal{*node.incoming, node.rationale, e.score},
             "navigated to " + node.view.url, true, e);
    check_goal(id);
    if (winner_) return true;
    advance(e, tree_[id].view);
    if (e.score < cfg_.prune_epsilon) {
        tree_[id].pruned = true;
        trace_.emit("prune", Json{{"nodes", {id}}, {"reason", "low_value"}});
    }
    return false;
}

std::vector<ActionProposal> Engine::proposals_for(NodeId id) {
    const PageView view = tree_[id].view;
    const auto cached = memory_.load_for_url(view.url);
    const PageMemory* mem = cached ? &*cached : nullptr;
    ProposeRequest req{task_.intent,
                       make_context(view, plan_.active().objective, mem),
                       plan_.active(),
                       plan_.final_active(),
                       task_.inputs,
                       mem ? mem->progress_summary : std::string(),
                       mem ? mem->history : std::vector<CycleRecord>{},
                       cfg_.branch};
    auto proposals = validate_proposals(reasoner_.propose(req), cfg_.branch);

    const auto& hints = tree_[id].hints;
    if (!hints.empty()) {
        std::stable_sort(proposals.begin(), proposals.end(), [&](const ActionProposal& a, const ActionProposal& b) {
            const auto ia = std::find(hints.begin(), hints.end(), a.action) - hints.begin();
            const auto ib = std::find(hints.begin(), hints.end(), b.action) - hints.begin();
            return ia < ib;
        });
    }

    Json listed = Json::array();
    for (const auto& p : proposals) listed.push_back(render_proposal(p));
    trace_.emit("propose", Json{{"node", id}, {"url", view.url}, {"proposals", std::move(listed)}});

    std::vector<ActionProposal> out;
    std::set<std::string> seen;
    for (auto& p : proposals) {
        const std::string sig = action_signature(p.action);
        if (!applicable(p.action, view, graph_)) {
            trace_.emit("invalid_proposal", Json{{"node", id}, {"signature", sig}});
        } else if (mem && mem->is_irrelevant(sig)) {
            trace_.emit("suppressed", Json{{"node", id}, {"url", view.url}, {"signature", sig}});
        } else if (seen.insert(sig).second) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

bool Engine::expand(NodeId id) {
    tree_[id].expanded = true;
    const auto proposals = proposals_for(id);
    const std::string url = tree_[id].view.url;
    for (const auto& p : proposals) {
        const std::string sig = action_signature(p.action);
        const auto& kids = tree_[id].children;
        auto existing = std::find_if(kids.begin(), kids.end(),
                                     [&](NodeId k) { return tree_[k].incoming && *tree_[k].incoming == p.action; });
        if (existing != kids.end()) {
            const NodeId k = *existing;
            trace_.emit("reuse", Json{{"node", id}, {"child", k}, {"signature", sig}});
            if (!tree_[k].focused && focus(k)) return true;
            continue;
        }
        if (const PageMemory* m = memory_.find(url); m && m->is_irrelevant(sig)) {
            trace_.emit("suppressed", Json{{"node", id}, {"url", url}, {"signature", sig}});
            continue;
        }
        if (!budget_left()) {
            trace_.emit("budget_exhausted", Json{{"env_actions", stats_.env_actions}});
            break;
        }
        execute(id, p);
        if (winner_) return true;
    }
    return false;
}

void Engine::refine(NodeId around) {
    if (plan_.complete) return;
    NodeId focus_node = around;
    double best = -1.0;
    for (NodeId k : tree_[around].children) {
        if (tree_[k].focused && tree_[k].value > best) {
            best = tree_[k].value;
            focus_node = k;
        }
    }
    const SearchNode& n = tree_[focus_node];
    const Subtask before = plan_.active();
    Subtask updated = update_subtask(before, task_.intent, n.view, n.prefix, reasoner_);
    ++stats_.subtask_updates;
    const bool changed = updated.revision != before.revision;
    plan_ = apply_update(std::move(plan_), std::move(updated));
    trace_.emit("refine", Json{{"subtask", plan_.active_index}, {"changed", changed},
                               {"objective", plan_.active().objective}, {"revision", plan_.active().revision}});
    if (changed) rescore();
}

// Queued values were judged against the old objective.
void Engine::rescore() {
    Json changed = Json::array();
    for (const auto& entry : std::vector<Frontier::Entry>(frontier_.entries())) {
        SearchNode& n = tree_[entry.node];
        if (!n.focused) continue;
        const Evaluation e = evaluate(entry.node);
        n.value = e.score;
        frontier_.update(entry.node, e.score);
        if (n.parent && n.incoming) {
            const std::string& url = tree_[*n.parent].view.url;
            const std::string sig = action_signature(*n.incoming);
            const Relevance rel = classify(e, cfg_.prune_epsilon);
            memory_.reclassify(url, sig, rel);
            trace_.emit("memory", Json{{"url", url}, {"signature", sig},
                                       {"relevance", std::string(relevance_name(rel))}, {"reason", "rescore"}});
        }
        changed.push_back(Json{{"node", entry.node}, {"value", e.score}});
    }
    if (!changed.empty()) trace_.emit("rescore", Json{{"nodes", std::move(changed)}});
}

void Engine::prune_round() {
    const auto removed = prune(tree_, frontier_, cfg_.prune_epsilon);
    if (!removed.empty()) trace_.emit("prune", Json{{"nodes", removed}, {"reason", "low_value_or_repeat"}});
}

BackgroundSnapshot Engine::snapshot() {
    BackgroundSnapshot snap;
    snap.live = live_;
    snap.intent = task_.intent;
    snap.subtask = plan_.active();
    snap.final_subtask = plan_.final_active();
    snap.inputs = task_.inputs;
    snap.branch = cfg_.branch;
    for (const auto& e : frontier_.entries()) {
        const SearchNode& n = tree_[e.node];
        if (bg_visited_.count(e.node) || n.depth >= cfg_.depth) continue;
        const PageMemory* mem = memory_.find(n.view.url);
        snap.targets.push_back(
            FrontierTarget{e.node, e.value, e.ordinal, n.prefix, make_context(n.view, plan_.active().objective, mem)});
    }
    return snap;
}

void Engine::absorb(BackgroundOutcome outcome, const std::string& before, const std::string& after) {
    bg_visited_.insert(outcome.visited.begin(), outcome.visited.end());
    bg_budget_left_ -= std::min(bg_budget_left_, outcome.expansions);
    stats_.background_expansions += outcome.expansions;

    Json pre = Json::array();
    Json deferred = Json::array();
    for (const auto& bp : outcome.proposals) {
        Json item{{"node", bp.node}, {"signature", action_signature(bp.proposal.action)},
                  {"kind", std::string(bp.proposal.action.name())}, {"relevance", bp.proposal.relevance}};
        if (bp.pre_expandable) {
            const auto ref = *bp.proposal.action.element();
            const auto* el = tree_[bp.node].view.find_element(ref);
            item["href"] = el && el->href ? Json(*el->href) : Json(nullptr);
            item["landed"] = bp.simulated->view.url;
            pre.push_back(std::move(item));
        } else {
            deferred.push_back(std::move(item));
        }
    }
    trace_.emit("background", Json{{"visited", outcome.visited}, {"expansions", outcome.expansions},
                                   {"live_digest_before", before}, {"live_digest_after", after},
                                   {"pre_expanded", std::move(pre)}, {"deferred", std::move(deferred)},
                                   {"skipped", outcome.skipped}});
    const auto added = merge_proposals(tree_, frontier_, outcome.proposals, graph_, plan_.active(), cfg_.depth,
                                       cfg_.prune_epsilon);
    if (!added.empty()) trace_.emit("merge", Json{{"nodes", added}});
}

void Engine::background_round() {
    if (bg_budget_left_ == 0 && !pending_.valid()) return;
    if (!cfg_.concurrent_background) {
        BackgroundSnapshot snap = snapshot();
        if (snap.targets.empty()) return;
        const std::string before = state_hash(live_);
        auto outcome = background_step(snap, graph_, reasoner_, bg_budget_left_, cfg_.background_nodes_per_cycle);
        absorb(std::move(outcome), before, state_hash(live_));
        return;
    }
    if (pending_.valid()) {
        if (pending_.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return;
        absorb(pending_.get(), pending_digest_, pending_digest_);
    }
    if (bg_budget_left_ == 0) return;
    BackgroundSnapshot snap = snapshot();
    if (snap.targets.empty()) return;
    pending_digest_ = state_hash(snap.live);
    pending_ = std::async(std::launch::async, [snap = std::move(snap), this, budget = bg_budget_left_] {
        return background_step(snap, graph_, *bg_reasoner_, budget, cfg_.background_nodes_per_cycle);
    });
}

} // namespace

SearchResult search(const Task& task, const SearchConfig& config, Reasoner& reasoner, MemoryStore& memory,
                    TraceSink& trace) {
    return Engine(task, config, reasoner, memory, trace).run();
}

} // namespace bnb
