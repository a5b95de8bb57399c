#include "bnb/reasoner.hpp"
#include "bnb/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace bnb {

namespace {

std::set<std::string> united(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Splits on sentence punctuation and on the word "then".
std::vector<std::string> clauses(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto t = trim(cur);
        if (!t.empty()) out.push_back(std::move(t));
        cur.clear();
    };
    const auto tokens_then = [&](std::size_t i) {
        if (text.compare(i, 5, " then") != 0) return false;
        return i + 5 == text.size() || text[i + 5] == ' ';
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == ';' || ch == ',' || ch == '.' || ch == '?' || ch == '!' || ch == '\n') {
            flush();
        } else if (tokens_then(i)) {
            flush();
            i += 4;
        } else {
            cur += ch;
        }
    }
    flush();
    return out;
}

struct Candidate {
    ActionProposal proposal;
    std::size_t score = 0;
    std::string ref;
};

const std::string* best_text(const std::vector<std::string>& texts, const std::set<std::string>& against) {
    const std::string* best = nullptr;
    std::size_t best_score = 0;
    for (const auto& t : texts) {
        const std::size_t s = overlap(token_set(t), against);
        if (!best || s > best_score) {
            best = &t;
            best_score = s;
        }
    }
    return best;
}

std::string page_text(std::string_view title, std::string_view dom_text) {
    std::string s(title);
    s += ' ';
    s += dom_text;
    return s;
}

bool satisfied_here(const ProposeRequest& req) {
    PageView view;
    view.url = req.node.url;
    view.title = req.node.title;
    view.dom_text = req.node.dom_text;
    view.elements = req.node.elements;
    return scripted_evaluate(EvaluateRequest{req.intent, view, req.subtask, req.final_subtask}).subtask_done;
}

} // namespace

std::vector<SubtaskHint> scripted_decompose(const DecomposeRequest& req) {
    std::vector<SubtaskHint> out;
    if (!req.hints.empty()) {
        out = req.hints;
    } else {
        for (auto& c : clauses(req.intent)) out.push_back(SubtaskHint{std::move(c), pred::EvaluatorFlag{}});
        if (out.empty()) out.push_back(SubtaskHint{req.intent, pred::EvaluatorFlag{}});
    }

    // Authored hints already are a plan; summaries only seed a derived one.
    if (req.hints.empty() && !req.context.empty()) {
        const auto wanted = token_set(req.intent);
        const PageSummary* best = nullptr;
        std::size_t best_score = 0;
        for (const auto& s : req.context) {
            const std::size_t score = overlap(token_set(s.title), wanted);
            if (score > best_score) {
                best = &s;
                best_score = score;
            }
        }
        const bool known = best && std::any_of(out.begin(), out.end(), [&](const SubtaskHint& h) {
            const auto* u = std::get_if<pred::UrlReached>(&h.predicate);
            return u && u->url == best->url;
        });
        if (best && !known) out.insert(out.begin(), SubtaskHint{"open " + best->title, pred::UrlReached{best->url}});
    }

    if (out.size() > kMaxSubtasks) out.resize(kMaxSubtasks);
    return out;
}

std::vector<ActionProposal> scripted_propose(const ProposeRequest& req) {
    const auto objective = token_set(req.subtask.objective);
    const double denom = objective.empty() ? 1.0 : static_cast<double>(objective.size());

    std::vector<Candidate> cands;
    for (const auto& el : req.node.elements) {
        const auto label = token_set(el.label);
        std::optional<Action> action;
        std::string text = el.label;
        switch (el.kind) {
        case ElementKind::Link:
        case ElementKind::Button:
            action = act::Click{el.ref};
            if (el.href) text += " " + *el.href;
            break;
        case ElementKind::Field:
            if (const auto* input = best_text(req.inputs, united(objective, label))) {
                action = act::Type{el.ref, *input};
                text += " " + *input;
            }
            break;
        case ElementKind::Select:
            if (const auto* option = best_text(el.options, united(objective, label))) {
                action = act::Select{el.ref, *option};
                text += " " + *option;
            }
            break;
        case ElementKind::Draggable:
            break;
        }
        if (!action || req.node.suppressed(action_signature(*action))) continue;
        const std::size_t score = overlap(objective, token_set(text));
        auto rationale = fmt::format("'{}' shares {} of {} objective tokens", el.label, score, objective.size());
        cands.push_back(Candidate{ActionProposal{*action, std::move(rationale), score / denom}, score, el.ref});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.ref < b.ref;
    });

    std::vector<ActionProposal> out;
    if (req.final_subtask && satisfied_here(req)) {
        Action stop = act::Stop{scripted_answer(req.intent, req.subtask.objective, req.node)};
        if (!req.node.suppressed(action_signature(stop))) {
            out.push_back(ActionProposal{std::move(stop), "final subtask satisfied on this page", 1.0});
        }
    }
    for (auto& c : cands) out.push_back(std::move(c.proposal));
    if (out.size() > req.max_proposals) out.resize(req.max_proposals);
    return out;
}

Evaluation scripted_evaluate(const EvaluateRequest& req) {
    const auto objective = token_set(req.subtask.objective);
    const auto page = token_set(page_text(req.view.title, req.view.dom_text));
    const std::size_t hit = overlap(objective, page);
    Evaluation e;
    e.score = objective.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(objective.size());
    if (std::holds_alternative<pred::EvaluatorFlag>(req.subtask.predicate)) {
        e.subtask_done = e.score == 1.0;
    } else {
        e.subtask_done = predicate_holds(req.subtask.predicate, e, req.view);
    }
    e.task_done_hint = e.subtask_done && req.final_subtask;
    e.rationale = fmt::format("{}: {} of {} objective tokens for '{}'", req.view.url, hit, objective.size(),
                              req.subtask.objective);
    return e;
}

std::optional<std::string> scripted_refine(const RefineRequest& req) {
    const auto objective = token_set(req.subtask.objective);
    auto views = req.trajectory;
    views.push_back(req.view);
    for (const auto& v : views) {
        if (overlap(objective, token_set(page_text(v.title, v.dom_text))) > 0) return std::nullopt;
    }
    const auto wanted = united(objective, token_set(req.intent));
    const std::string* best = nullptr;
    std::size_t best_score = 0;
    for (const auto& v : views) {
        for (const auto& el : v.elements) {
            const std::size_t s = overlap(token_set(el.label), wanted);
            if (s == 0) continue;
            if (!best || s > best_score || (s == best_score && el.label < *best)) {
                best = &el.label;
                best_score = s;
            }
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::string scripted_answer(const std::string& intent, const std::string& objective, const NodeContext& node) {
    const auto wanted = united(token_set(intent), token_set(objective));
    std::vector<std::string> sentences;
    std::string cur;
    const std::string& text = node.dom_text;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        cur += ch;
        const bool at_break = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
        if (ch == '\n' || ((ch == '.' || ch == '!' || ch == '?') && at_break)) {
            if (auto t = trim(cur); !t.empty()) sentences.push_back(std::move(t));
            cur.clear();
        }
    }
    if (auto t = trim(cur); !t.empty()) sentences.push_back(std::move(t));
    if (sentences.empty()) return node.title;
    return *best_text(sentences, wanted);
}

std::vector<ActionProposal> validate_proposals(std::vector<ActionProposal> proposals, std::size_t b) {
    if (proposals.size() > b) proposals.resize(b);
    for (auto& p : proposals) {
        if (std::isnan(p.relevance)) p.relevance = 0.0;
        p.relevance = std::clamp(p.relevance, 0.0, 1.0);
    }
    return proposals;
}

bool NodeContext::suppressed(std::string_view signature) const {
    return std::any_of(action_memory.begin(), action_memory.end(), [&](const ActionEntry& e) {
        return e.signature == signature && e.relevance == Relevance::Irrelevant;
    });
}

NodeContext make_context(const PageView& view, const std::string& objective, const PageMemory* memory) {
    NodeContext ctx{view.url, view.title, view.dom_text, view.elements, objective, {}};
    if (memory) ctx.action_memory = memory->action_memory;
    return ctx;
}

} // namespace bnb
