#include "bnb/reasoner.hpp"

#include "bnb/error.hpp"
#include "bnb/json_util.hpp"

#include "httplib.h"

#include <cmath>

namespace bnb {

namespace {

std::string clip(const std::string& text, std::size_t limit) {
    return text.size() <= limit ? text : text.substr(0, limit);
}

Json render_elements(const std::vector<ElementSpec>& elements) {
    Json out = Json::array();
    for (const auto& e : elements) out.push_back(render_element(e));
    return out;
}

Json render_page(const PageView& v, std::size_t limit) {
    return Json{{"url", v.url}, {"title", v.title}, {"dom_text", clip(v.dom_text, limit)},
                {"elements", render_elements(v.elements)}};
}

// Strips the envelope, checking version and kind.
const Json& result_of(const Json& doc, RequestKind kind) {
    if (!doc.is_object()) throw MalformedResponse("response is not an object");
    const Json* version = jsonu::optional(doc, "version");
    if (!version || !version->is_number_integer() || version->get<int>() != kReasonerProtocolVersion) {
        throw MalformedResponse("response version missing or unsupported");
    }
    const Json* k = jsonu::optional(doc, "kind");
    if (!k || !k->is_string() || k->get<std::string>() != request_kind_name(kind)) {
        throw MalformedResponse("response kind does not match request kind " + std::string(request_kind_name(kind)));
    }
    const Json* result = jsonu::optional(doc, "result");
    if (!result || !result->is_object()) throw MalformedResponse("response has no result object");
    return *result;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const MalformedResponse&) {
        throw;
    } catch (const Error& e) {
        throw MalformedResponse(e.what());
    } catch (const Json::exception& e) {
        throw MalformedResponse(e.what());
    }
}

} // namespace

std::string_view request_kind_name(RequestKind kind) {
    switch (kind) {
    case RequestKind::Decompose: return "decompose";
    case RequestKind::Propose: return "propose";
    case RequestKind::Evaluate: return "evaluate";
    case RequestKind::Refine: return "refine";
    case RequestKind::BackgroundInfer: return "background_infer";
    }
    return "propose";
}

Json render_decompose_payload(const DecomposeRequest& req) {
    Json hints = Json::array();
    for (const auto& h : req.hints) hints.push_back(render_hint(h));
    Json memory = Json::array();
    for (const auto& s : req.context) {
        memory.push_back(Json{{"url", s.url}, {"title", s.title}, {"progress_summary", s.progress_summary},
                              {"visited_actions", s.visited_actions}});
    }
    return Json{{"intent", req.intent}, {"hints", std::move(hints)}, {"memory", std::move(memory)}};
}

Json render_propose_payload(const ProposeRequest& req, std::size_t limit) {
    Json history = Json::array();
    for (const auto& r : req.history) {
        history.push_back(Json{{"action_id", r.action_id}, {"name", r.name}, {"ref", r.ref}, {"result", r.result}});
    }
    Json memory = Json::array();
    for (const auto& a : req.node.action_memory) {
        memory.push_back(Json{{"signature", a.signature}, {"relevance", std::string(relevance_name(a.relevance))},
                              {"success", a.success}, {"note", a.note}});
    }
    return Json{
        {"objective", {{"global_intent", req.intent}, {"active_subtask", req.node.objective}}},
        {"subtask", render_subtask(req.subtask)},
        {"final_subtask", req.final_subtask},
        {"progress_summary", req.progress_summary},
        {"history", std::move(history)},
        {"snapshot",
         {{"url", req.node.url},
          {"title", req.node.title},
          {"dom_text", clip(req.node.dom_text, limit)},
          {"elements", render_elements(req.node.elements)}}},
        {"action_memory", std::move(memory)},
        {"inputs", req.inputs},
        {"max_proposals", req.max_proposals},
    };
}

Json render_evaluate_payload(const EvaluateRequest& req, std::size_t limit) {
    return Json{{"intent", req.intent}, {"subtask", render_subtask(req.subtask)},
                {"final_subtask", req.final_subtask}, {"page", render_page(req.view, limit)}};
}

Json render_refine_payload(const RefineRequest& req, std::size_t limit) {
    Json trajectory = Json::array();
    for (const auto& v : req.trajectory) trajectory.push_back(Json{{"url", v.url}, {"title", v.title}});
    return Json{{"intent", req.intent}, {"subtask", render_subtask(req.subtask)},
                {"page", render_page(req.view, limit)}, {"trajectory", std::move(trajectory)}};
}

Json render_request(RequestKind kind, Json payload, std::uint64_t seed) {
    return Json{{"version", kReasonerProtocolVersion}, {"kind", std::string(request_kind_name(kind))},
                {"payload", std::move(payload)}, {"seed", seed}};
}

std::vector<SubtaskHint> parse_decompose_response(const Json& doc) {
    return guarded([&] {
        const Json& result = result_of(doc, RequestKind::Decompose);
        const Json& list = jsonu::require(result, "subtasks", "/result");
        jsonu::require_array(list, "/result/subtasks");
        std::vector<SubtaskHint> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            out.push_back(parse_hint(list[i], "/result/subtasks/" + std::to_string(i)));
        }
        return out;
    });
}

std::vector<ActionProposal> parse_propose_response(const Json& doc, RequestKind kind, std::size_t b) {
    return guarded([&] {
        const Json& result = result_of(doc, kind);
        const Json& list = jsonu::require(result, "proposals", "/result");
        jsonu::require_array(list, "/result/proposals");
        std::vector<ActionProposal> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "/result/proposals/" + std::to_string(i);
            const Json& p = list[i];
            jsonu::require_object(p, where);
            ActionProposal prop;
            prop.action = parse_action(jsonu::require(p, "action", where));
            if (!is_well_formed(prop.action)) throw MalformedResponse("ill-formed action at " + where);
            prop.rationale = jsonu::optional_string(p, "rationale", where).value_or("");
            prop.relevance = jsonu::require_number(p, "relevance", where);
            out.push_back(std::move(prop));
        }
        return validate_proposals(std::move(out), b);
    });
}

Evaluation parse_evaluate_response(const Json& doc) {
    return guarded([&] {
        const Json& result = result_of(doc, RequestKind::Evaluate);
        Evaluation e;
        e.score = jsonu::require_number(result, "score", "/result");
        e.subtask_done = jsonu::require_bool(result, "subtask_done", "/result");
        const Json* hint = jsonu::optional(result, "task_done_hint");
        e.task_done_hint = hint ? jsonu::require_bool(result, "task_done_hint", "/result") : false;
        e.rationale = jsonu::optional_string(result, "rationale", "/result").value_or("");
        return clamped(std::move(e));
    });
}

std::optional<std::string> parse_refine_response(const Json& doc) {
    return guarded([&]() -> std::optional<std::string> {
        const Json& result = result_of(doc, RequestKind::Refine);
        auto objective = jsonu::optional_string(result, "objective", "/result");
        if (objective && objective->empty()) throw MalformedResponse("refined objective is empty");
        return objective;
    });
}

// ── client ───────────────────────────────────────────────────────────────────

RemoteReasoner::RemoteReasoner(RemoteConfig config) : config_(std::move(config)) {
    const std::string& ep = config_.endpoint;
    const auto scheme_end = ep.find("://");
    if (scheme_end == std::string::npos) throw InvalidConfig("endpoint '" + ep + "' has no scheme");
    const auto path_start = ep.find('/', scheme_end + 3);
    host_ = ep.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : ep.substr(path_start);
    if (config_.retries < 0) throw InvalidConfig("retry count must be non-negative");
}

Json RemoteReasoner::call(RequestKind kind, Json payload) {
    const std::string body = render_request(kind, std::move(payload), config_.seed).dump();
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    std::string last_error;
    bool timed_out = false;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            const auto err = res.error();
            timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
            last_error = httplib::to_string(err);
            continue;
        }
        if (res->status >= 500) {
            timed_out = false;
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw TransportError("reasoner endpoint answered HTTP " + std::to_string(res->status));
        try {
            return Json::parse(res->body);
        } catch (const Json::parse_error& e) {
            throw MalformedResponse(std::string("response is not JSON: ") + e.what());
        }
    }
    const std::string msg = "reasoner request failed after " + std::to_string(config_.retries + 1) +
                            " attempts: " + last_error;
    if (timed_out) throw ReasonerTimeout(msg);
    throw TransportError(msg);
}

std::vector<SubtaskHint> RemoteReasoner::decompose(const DecomposeRequest& req) {
    return parse_decompose_response(call(RequestKind::Decompose, render_decompose_payload(req)));
}

std::vector<ActionProposal> RemoteReasoner::propose(const ProposeRequest& req) {
    return parse_propose_response(call(RequestKind::Propose, render_propose_payload(req, config_.dom_text_limit)),
                                  RequestKind::Propose, req.max_proposals);
}

std::vector<ActionProposal> RemoteReasoner::background_infer(const ProposeRequest& req) {
    return parse_propose_response(
        call(RequestKind::BackgroundInfer, render_propose_payload(req, config_.dom_text_limit)),
        RequestKind::BackgroundInfer, req.max_proposals);
}

Evaluation RemoteReasoner::evaluate(const EvaluateRequest& req) {
    return parse_evaluate_response(call(RequestKind::Evaluate, render_evaluate_payload(req, config_.dom_text_limit)));
}

std::optional<std::string> RemoteReasoner::refine(const RefineRequest& req) {
    return parse_refine_response(call(RequestKind::Refine, render_refine_payload(req, config_.dom_text_limit)));
}

std::unique_ptr<Reasoner> RemoteReasoner::new_session() const {
    return std::make_unique<RemoteReasoner>(config_);
}

} // namespace bnb
