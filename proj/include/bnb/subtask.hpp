#pragma once

#include "bnb/env.hpp"
#include "bnb/evaluation.hpp"
#include "bnb/memory.hpp"
#include "bnb/replay.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bnb {

class Reasoner;

inline constexpr std::size_t kMaxSubtasks = 8;

namespace pred {
struct EvaluatorFlag {                      bool operator==(const EvaluatorFlag&) const = default; };
struct UrlReached    { std::string url;     bool operator==(const UrlReached&) const = default; };
struct KeywordOnPage { std::string keyword; bool operator==(const KeywordOnPage&) const = default; };
} // namespace pred

// How completion of a subtask is decided.
using PredicateSpec = std::variant<pred::EvaluatorFlag, pred::UrlReached, pred::KeywordOnPage>;

Json render_predicate(const PredicateSpec& p);
PredicateSpec parse_predicate(const Json& doc, const std::string& where);
std::string describe(const PredicateSpec& p);

enum class SubtaskStatus { Pending, Active, Done, Reformulated };

std::string_view subtask_status_name(SubtaskStatus s);

struct Subtask {
    std::size_t index = 0;
    std::string objective;
    PredicateSpec predicate;
    SubtaskStatus status = SubtaskStatus::Pending;
    std::size_t revision = 0;

    bool operator==(const Subtask&) const = default;
};

Json render_subtask(const Subtask& s);

// Objective and predicate as authored in a task file or returned by a reasoner.
struct SubtaskHint {
    std::string objective;
    PredicateSpec predicate;

    bool operator==(const SubtaskHint&) const = default;
};

Json render_hint(const SubtaskHint& h);
SubtaskHint parse_hint(const Json& doc, const std::string& where);

struct Plan {
    std::string intent;
    std::vector<Subtask> subtasks;
    std::size_t active_index = 0;
    bool complete = false;  // the last subtask is done

    const Subtask& active() const { return subtasks.at(active_index); }
    bool final_active() const { return active_index + 1 == subtasks.size(); }
    bool operator==(const Plan&) const = default;
};

// Asks the reasoner for subtasks; at most kMaxSubtasks are kept, the first
// becomes active. Memory summaries, when non-empty, are forwarded.
Plan decompose(const std::string& intent, const std::vector<SubtaskHint>& hints,
               const std::vector<PageSummary>& context, Reasoner& reasoner);

// One refinement round for the active subtask. Returns it unchanged or with
// a new objective, revision + 1 and status Reformulated.
Subtask update_subtask(const Subtask& u, const std::string& intent, const PageView& view,
                       const Trajectory& trajectory, Reasoner& reasoner);

// Installs a subtask returned by update_subtask at its index; a reformulated
// subtask becomes active again.
Plan apply_update(Plan plan, Subtask updated);

bool predicate_holds(const PredicateSpec& p, const Evaluation& eval, const PageView& view);

// Marks the active subtask done and activates the next when its predicate
// holds for (eval, view). Completing the last subtask sets plan.complete.
Plan check_and_advance(Plan plan, const Evaluation& eval, const PageView& view);

} // namespace bnb
