#include "bnb/replay.hpp"

#include "bnb/error.hpp"

namespace bnb {

namespace {

std::vector<std::string> to_urls(const std::vector<std::string>& page_ids, const SiteGraph& graph) {
    std::vector<std::string> out;
    out.reserve(page_ids.size());
    for (const auto& id : page_ids) out.push_back(graph.page(id).url);
    return out;
}

std::vector<std::string> to_page_ids(const std::vector<std::string>& urls, const SiteGraph& graph) {
    std::vector<std::string> out;
    out.reserve(urls.size());
    for (const auto& url : urls) {
        const PageSpec* p = graph.page_by_url(url);
        if (!p) throw NavigateUnknownUrl("no page has url '" + url + "'");
        out.push_back(p->id);
    }
    return out;
}

} // namespace

std::optional<Checkpoint> checkpoint_of(const EnvState& state, const SiteGraph& graph, bool navigated) {
    if (!navigated || state.tabs.size() != 1) return std::nullopt;
    const TabState& tab = state.tabs.front();
    if (!tab.form_state.empty()) return std::nullopt;
    return Checkpoint{graph.page(tab.page).url, to_urls(tab.back, graph), to_urls(tab.forward, graph)};
}

Trajectory Trajectory::start(const EnvState& state, const SiteGraph& graph) {
    auto cp = checkpoint_of(state, graph, true);
    if (!cp) throw IndexOutOfRange("a trajectory must start at a freshly loaded single-tab state");
    Trajectory t;
    t.views_.push_back(observe(state, graph));
    t.checkpoints_.push_back(std::move(cp));
    t.session_digests_.push_back(session_hash(state));
    return t;
}

void Trajectory::extend(const Action& action, const StepResult& result, const SiteGraph& graph) {
    actions_.push_back(action);
    views_.push_back(result.view);
    checkpoints_.push_back(checkpoint_of(result.state, graph, result.navigated));
    session_digests_.push_back(session_hash(result.state));
}

EnvState load_checkpoint(const EnvState& live, const SiteGraph& graph, const Checkpoint& checkpoint) {
    const PageSpec* page = graph.page_by_url(checkpoint.url);
    if (!page) throw NavigateUnknownUrl("no page has url '" + checkpoint.url + "'");
    EnvState s;
    s.tabs.push_back(TabState{page->id, {}, to_page_ids(checkpoint.back_urls, graph),
                              to_page_ids(checkpoint.forward_urls, graph)});
    s.active = 0;
    s.world = live.world;
    return s;
}

std::size_t nearest_checkpoint(const Trajectory& tau, std::size_t j) {
    if (j >= tau.size()) {
        throw IndexOutOfRange("index " + std::to_string(j) + " outside trajectory of " + std::to_string(tau.size()) +
                              " views");
    }
    for (std::size_t c = j + 1; c-- > 0;) {
        if (tau.cacheable(c)) return c;
    }
    return 0;  // unreachable: index 0 is always cacheable
}

ReplayOutcome replay_from(const EnvState& live, const SiteGraph& graph, const Trajectory& tau, std::size_t j,
                          std::size_t c) {
    if (j >= tau.size()) throw IndexOutOfRange("index " + std::to_string(j) + " outside trajectory");
    if (c > j || !tau.cacheable(c)) throw IndexOutOfRange("index " + std::to_string(c) + " is not a checkpoint");

    ReplayOutcome out{load_checkpoint(live, graph, *tau.checkpoint(c)), c, 0};
    for (std::size_t i = c; i < j; ++i) {
        out.state = step(out.state, graph, tau.actions()[i]).state;
        ++out.replayed;
    }
    if (session_hash(out.state) != tau.session_digest(j)) {
        throw ReplayDivergence("replay of index " + std::to_string(j) + " from checkpoint " + std::to_string(c) +
                               " did not reproduce the recorded session");
    }
    return out;
}

ReplayOutcome replay(const EnvState& live, const SiteGraph& graph, const Trajectory& tau, std::size_t j) {
    return replay_from(live, graph, tau, j, nearest_checkpoint(tau, j));
}

Json render_trajectory(const Trajectory& tau) {
    Json steps = Json::array();
    for (std::size_t j = 0; j < tau.size(); ++j) {
        Json v{{"url", tau.view(j).url}, {"digest", tau.view(j).state_digest}, {"cacheable", tau.cacheable(j)}};
        steps.push_back(std::move(v));
        if (j < tau.actions().size()) steps.push_back(Json{{"action", render_action(tau.actions()[j])}});
    }
    return steps;
}

} // namespace bnb
