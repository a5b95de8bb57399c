#include "bnb/subtask.hpp"

#include "bnb/error.hpp"
#include "bnb/json_util.hpp"
#include "bnb/reasoner.hpp"
#include "bnb/text.hpp"

namespace bnb {

namespace {

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };

} // namespace

Json render_predicate(const PredicateSpec& p) {
    return std::visit(overloaded{
        [](const pred::EvaluatorFlag&) { return Json{{"type", "evaluator_flag"}}; },
        [](const pred::UrlReached& u) { return Json{{"type", "url_reached"}, {"url", u.url}}; },
        [](const pred::KeywordOnPage& k) { return Json{{"type", "keyword_on_page"}, {"keyword", k.keyword}}; },
    }, p);
}

PredicateSpec parse_predicate(const Json& doc, const std::string& where) {
    jsonu::require_object(doc, where);
    const std::string type = jsonu::require_string(doc, "type", where);
    if (type == "evaluator_flag") {
        if (doc.size() != 1) throw ParseError("evaluator_flag takes no fields", 0, where);
        return pred::EvaluatorFlag{};
    }
    if (type == "url_reached") {
        if (doc.size() != 2) throw ParseError("url_reached takes exactly 'url'", 0, where);
        return pred::UrlReached{jsonu::require_string(doc, "url", where)};
    }
    if (type == "keyword_on_page") {
        if (doc.size() != 2) throw ParseError("keyword_on_page takes exactly 'keyword'", 0, where);
        auto keyword = jsonu::require_string(doc, "keyword", where);
        if (keyword.empty()) throw ParseError("empty keyword", 0, where + "/keyword");
        return pred::KeywordOnPage{std::move(keyword)};
    }
    throw ParseError("unknown predicate type '" + type + "'", 0, where + "/type");
}

std::string describe(const PredicateSpec& p) {
    return std::visit(overloaded{
        [](const pred::EvaluatorFlag&) { return std::string("evaluator_flag"); },
        [](const pred::UrlReached& u) { return "url_reached(" + u.url + ")"; },
        [](const pred::KeywordOnPage& k) { return "keyword_on_page(" + k.keyword + ")"; },
    }, p);
}

std::string_view subtask_status_name(SubtaskStatus s) {
    switch (s) {
    case SubtaskStatus::Pending: return "pending";
    case SubtaskStatus::Active: return "active";
    case SubtaskStatus::Done: return "done";
    case SubtaskStatus::Reformulated: return "reformulated";
    }
    return "pending";
}

Json render_subtask(const Subtask& s) {
    return Json{{"index", s.index},
                {"objective", s.objective},
                {"predicate", render_predicate(s.predicate)},
                {"status", std::string(subtask_status_name(s.status))},
                {"revision", s.revision}};
}

Json render_hint(const SubtaskHint& h) {
    return Json{{"objective", h.objective}, {"predicate", render_predicate(h.predicate)}};
}

SubtaskHint parse_hint(const Json& doc, const std::string& where) {
    jsonu::require_object(doc, where);
    SubtaskHint h;
    h.objective = jsonu::require_string(doc, "objective", where);
    if (h.objective.empty()) throw ParseError("empty objective", 0, where + "/objective");
    if (const Json* p = jsonu::optional(doc, "predicate")) {
        h.predicate = parse_predicate(*p, where + "/predicate");
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "objective" && key != "predicate") throw ParseError("unexpected field '" + key + "'", 0, where);
    }
    return h;
}

Plan decompose(const std::string& intent, const std::vector<SubtaskHint>& hints,
               const std::vector<PageSummary>& context, Reasoner& reasoner) {
    if (intent.empty()) throw InvalidConfig("task intent is empty");
    auto list = reasoner.decompose(DecomposeRequest{intent, hints, context});
    if (list.empty()) throw ReasonerFailure("decomposition returned no subtasks");
    if (list.size() > kMaxSubtasks) list.resize(kMaxSubtasks);

    Plan plan;
    plan.intent = intent;
    for (std::size_t k = 0; k < list.size(); ++k) {
        if (list[k].objective.empty()) throw ReasonerFailure("decomposition returned an empty objective");
        plan.subtasks.push_back(Subtask{k, std::move(list[k].objective), std::move(list[k].predicate),
                                        k == 0 ? SubtaskStatus::Active : SubtaskStatus::Pending, 0});
    }
    return plan;
}

Subtask update_subtask(const Subtask& u, const std::string& intent, const PageView& view,
                       const Trajectory& trajectory, Reasoner& reasoner) {
    auto objective = reasoner.refine(RefineRequest{intent, u, view, trajectory.views()});
    if (!objective || *objective == u.objective) return u;
    Subtask out = u;
    out.objective = std::move(*objective);
    out.revision = u.revision + 1;
    out.status = SubtaskStatus::Reformulated;
    return out;
}

Plan apply_update(Plan plan, Subtask updated) {
    if (updated.index >= plan.subtasks.size()) throw IndexOutOfRange("subtask index outside plan");
    if (updated.status == SubtaskStatus::Reformulated) updated.status = SubtaskStatus::Active;
    plan.subtasks[updated.index] = std::move(updated);
    return plan;
}

bool predicate_holds(const PredicateSpec& p, const Evaluation& eval, const PageView& view) {
    return std::visit(overloaded{
        [&](const pred::EvaluatorFlag&) { return eval.subtask_done; },
        [&](const pred::UrlReached& u) { return view.url == u.url; },
        [&](const pred::KeywordOnPage& k) {
            return contains_ci(view.title, k.keyword) || contains_ci(view.dom_text, k.keyword);
        },
    }, p);
}

Plan check_and_advance(Plan plan, const Evaluation& eval, const PageView& view) {
    if (plan.complete || plan.subtasks.empty()) return plan;
    Subtask& cur = plan.subtasks[plan.active_index];
    if (!predicate_holds(cur.predicate, eval, view)) return plan;
    cur.status = SubtaskStatus::Done;
    if (plan.final_active()) {
        plan.complete = true;
        return plan;
    }
    ++plan.active_index;
    plan.subtasks[plan.active_index].status = SubtaskStatus::Active;
    return plan;
}

} // namespace bnb
