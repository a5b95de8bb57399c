#include "bnb/background.hpp"

#include "bnb/error.hpp"

#include <algorithm>

namespace bnb {

namespace {

const std::string* href_of(const NodeContext& ctx, std::string_view ref) {
    auto it = std::find_if(ctx.elements.begin(), ctx.elements.end(), [&](const ElementSpec& e) { return e.ref == ref; });
    if (it == ctx.elements.end() || !it->href || it->href->empty()) return nullptr;
    return &*it->href;
}

} // namespace

bool is_pre_expandable(const Action& action, const NodeContext& ctx) {
    const auto* click = action.get_if<act::Click>();
    return click && href_of(ctx, click->element);
}

BackgroundOutcome background_step(const BackgroundSnapshot& snapshot, const SiteGraph& graph, Reasoner& reasoner,
                                  std::size_t budget, std::size_t max_nodes) {
    BackgroundOutcome out;
    if (budget == 0 || max_nodes == 0) return out;

    std::vector<const FrontierTarget*> order;
    for (const auto& t : snapshot.targets) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](const FrontierTarget* a, const FrontierTarget* b) {
        if (a->value != b->value) return a->value > b->value;
        return a->ordinal < b->ordinal;
    });

    for (const FrontierTarget* target : order) {
        if (out.visited.size() == max_nodes || out.expansions == budget) break;
        out.visited.push_back(target->node);

        std::vector<ActionProposal> proposals;
        try {
            ProposeRequest req{snapshot.intent, target->context, snapshot.subtask, snapshot.final_subtask,
                               snapshot.inputs, {}, {}, snapshot.branch};
            proposals = validate_proposals(reasoner.background_infer(req), snapshot.branch);
        } catch (const ReasonerFailure& e) {
            out.skipped.push_back("node " + std::to_string(target->node) + ": " + e.what());
            continue;
        }

        std::optional<EnvState> scratch;
        for (auto& p : proposals) {
            if (target->context.suppressed(action_signature(p.action))) continue;
            BackgroundProposal bp{target->node, std::move(p), false, std::nullopt};
            if (is_pre_expandable(bp.proposal.action, target->context) && out.expansions < budget) {
                try {
                    if (!scratch) {
                        scratch = replay(snapshot.live, graph, target->prefix, target->prefix.size() - 1).state;
                    }
                    ++out.expansions;
                    StepResult r = step(*scratch, graph, bp.proposal.action);
                    const std::string* href = href_of(target->context, *bp.proposal.action.element());
                    if (r.matched && r.navigated && r.view.url == *href && r.state.world == scratch->world) {
                        bp.pre_expandable = true;
                        bp.simulated = std::move(r);
                    }
                } catch (const Error& e) {
                    out.skipped.push_back("node " + std::to_string(target->node) + ": " + e.what());
                }
            }
            out.proposals.push_back(std::move(bp));
        }
    }
    return out;
}

} // namespace bnb
