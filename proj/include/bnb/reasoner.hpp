#pragma once

#include "bnb/action.hpp"
#include "bnb/env.hpp"
#include "bnb/evaluation.hpp"
#include "bnb/memory.hpp"
#include "bnb/subtask.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bnb {

inline constexpr int kReasonerProtocolVersion = 1;

// Read-only description of a node handed to the reasoner.
struct NodeContext {
    std::string url;
    std::string title;
    std::string dom_text;
    std::vector<ElementSpec> elements;
    std::string objective;
    std::vector<ActionEntry> action_memory;

    bool suppressed(std::string_view signature) const;
};

NodeContext make_context(const PageView& view, const std::string& objective, const PageMemory* memory);

struct ActionProposal {
    Action action;
    std::string rationale;
    double relevance = 0.0;

    bool operator==(const ActionProposal&) const = default;
};

struct DecomposeRequest {
    std::string intent;
    std::vector<SubtaskHint> hints;
    std::vector<PageSummary> context;
};

struct ProposeRequest {
    std::string intent;
    NodeContext node;
    Subtask subtask;
    bool final_subtask = false;
    std::vector<std::string> inputs;  // text the task allows typing
    std::string progress_summary;
    std::vector<CycleRecord> history;
    std::size_t max_proposals = 1;
};

struct EvaluateRequest {
    std::string intent;
    PageView view;
    Subtask subtask;
    bool final_subtask = false;
};

struct RefineRequest {
    std::string intent;
    Subtask subtask;
    PageView view;
    std::vector<PageView> trajectory;
};

// Policy and evaluator boundary. Implementations need not be thread-safe;
// new_session() gives an independent instance for another thread.
class Reasoner {
public:
    virtual ~Reasoner() = default;

    virtual std::vector<SubtaskHint> decompose(const DecomposeRequest& req) = 0;
    virtual std::vector<ActionProposal> propose(const ProposeRequest& req) = 0;
    virtual std::vector<ActionProposal> background_infer(const ProposeRequest& req) = 0;
    virtual Evaluation evaluate(const EvaluateRequest& req) = 0;
    // New objective for the subtask, or nullopt to keep it.
    virtual std::optional<std::string> refine(const RefineRequest& req) = 0;

    virtual std::unique_ptr<Reasoner> new_session() const = 0;
};

// Truncates to `b`, clamps relevance into [0, 1] (NaN → 0).
std::vector<ActionProposal> validate_proposals(std::vector<ActionProposal> proposals, std::size_t b);

// ── Scripted (lexical) reasoner ──────────────────────────────────────────────

std::vector<SubtaskHint> scripted_decompose(const DecomposeRequest& req);
std::vector<ActionProposal> scripted_propose(const ProposeRequest& req);
Evaluation scripted_evaluate(const EvaluateRequest& req);
std::optional<std::string> scripted_refine(const RefineRequest& req);

// Sentence of the page text that best answers the intent.
std::string scripted_answer(const std::string& intent, const std::string& objective, const NodeContext& node);

class ScriptedReasoner : public Reasoner {
public:
    std::vector<SubtaskHint> decompose(const DecomposeRequest& req) override { return scripted_decompose(req); }
    std::vector<ActionProposal> propose(const ProposeRequest& req) override { return scripted_propose(req); }
    std::vector<ActionProposal> background_infer(const ProposeRequest& req) override { return scripted_propose(req); }
    Evaluation evaluate(const EvaluateRequest& req) override { return scripted_evaluate(req); }
    std::optional<std::string> refine(const RefineRequest& req) override { return scripted_refine(req); }
    std::unique_ptr<Reasoner> new_session() const override { return std::make_unique<ScriptedReasoner>(); }
};

// ── Request / response documents ─────────────────────────────────────────────

enum class RequestKind { Decompose, Propose, Evaluate, Refine, BackgroundInfer };

std::string_view request_kind_name(RequestKind kind);

inline constexpr std::size_t kDefaultDomTextLimit = 4000;

Json render_decompose_payload(const DecomposeRequest& req);
Json render_propose_payload(const ProposeRequest& req, std::size_t dom_text_limit);
Json render_evaluate_payload(const EvaluateRequest& req, std::size_t dom_text_limit);
Json render_refine_payload(const RefineRequest& req, std::size_t dom_text_limit);

Json render_request(RequestKind kind, Json payload, std::uint64_t seed);

// Each parser checks the envelope and the result schema; any defect is a
// MalformedResponse.
std::vector<SubtaskHint> parse_decompose_response(const Json& doc);
std::vector<ActionProposal> parse_propose_response(const Json& doc, RequestKind kind, std::size_t b);
Evaluation parse_evaluate_response(const Json& doc);
std::optional<std::string> parse_refine_response(const Json& doc);

// ── Remote reasoner ──────────────────────────────────────────────────────────

struct RemoteConfig {
    std::string endpoint;  // http://host:port/path
    std::chrono::milliseconds timeout{30000};
    int retries = 2;       // extra attempts after a transport failure
    std::size_t dom_text_limit = kDefaultDomTextLimit;
    std::uint64_t seed = 0;
};

// JSON over HTTP POST: one request document in, one response document out.
class RemoteReasoner final : public Reasoner {
public:
    explicit RemoteReasoner(RemoteConfig config);

    std::vector<SubtaskHint> decompose(const DecomposeRequest& req) override;
    std::vector<ActionProposal> propose(const ProposeRequest& req) override;
    std::vector<ActionProposal> background_infer(const ProposeRequest& req) override;
    Evaluation evaluate(const EvaluateRequest& req) override;
    std::optional<std::string> refine(const RefineRequest& req) override;
    std::unique_ptr<Reasoner> new_session() const override;

    const RemoteConfig& config() const noexcept { return config_; }

private:
    Json call(RequestKind kind, Json payload);

    RemoteConfig config_;
    std::string host_;  // scheme://host:port
    std::string path_;
};

} // namespace bnb
