#pragma once

#include "bnb/action.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bnb {

inline constexpr int kSiteSchemaVersion = 1;

// Pattern text that makes a TYPE transition accept any typed text. In an
// effect value it stands for the typed text itself.
inline constexpr std::string_view kWildcard = "*";

enum class ElementKind { Link, Button, Field, Select, Draggable };

std::string_view element_kind_name(ElementKind kind);

struct ElementSpec {
    std::string ref;
    ElementKind kind = ElementKind::Link;
    std::string label;
    std::optional<std::string> href;
    std::vector<std::string> options;

    bool operator==(const ElementSpec&) const = default;
};

struct PageSpec {
    std::string id;
    std::string url;
    std::string title;
    std::string dom_text;
    std::vector<ElementSpec> elements;

    const ElementSpec* find_element(std::string_view ref) const;
};

struct WorldEffect {
    std::string name;
    std::string value;
};

struct TransitionSpec {
    std::string from;
    Action pattern;
    std::string to;
    bool navigates = false;
    std::optional<WorldEffect> effect;

    bool is_wildcard() const;
    bool matches(const Action& concrete) const;
};

namespace goal {
struct UrlEquals      { std::string url;                     bool operator==(const UrlEquals&) const = default; };
struct WorldVarEquals { std::string name; std::string value; bool operator==(const WorldVarEquals&) const = default; };
struct AnswerContains { std::string substring;               bool operator==(const AnswerContains&) const = default; };
} // namespace goal

using GoalSpec = std::variant<goal::UrlEquals, goal::WorldVarEquals, goal::AnswerContains>;

Json render_goal(const GoalSpec& goal);
GoalSpec parse_goal(const Json& doc, const std::string& where = "/goal");

// Declarative site: pages keyed by id, element-level transitions, start page
// and the goal predicate. Construct through load_site_graph or validate().
struct SiteGraph {
    std::string name;
    std::map<std::string, PageSpec> pages;
    std::vector<TransitionSpec> transitions;
    std::string start;
    GoalSpec goal;

    const PageSpec& page(std::string_view id) const;
    const PageSpec* page_by_url(std::string_view url) const;
    // The unique transition from `page_id` accepting `action`, if any.
    const TransitionSpec* match(std::string_view page_id, const Action& action) const;
};

// Checks every structural invariant; throws DanglingRef, DuplicateUrl,
// AmbiguousTransition or ParseError.
void validate(const SiteGraph& graph);

SiteGraph load_site_graph(const Json& doc);
SiteGraph load_site_graph(const std::filesystem::path& file);
Json render_site_graph(const SiteGraph& graph);

struct TabState {
    std::string page;
    std::map<std::string, std::string> form_state;
    std::vector<std::string> back;     // page ids, most recent last
    std::vector<std::string> forward;  // page ids, most recent last

    bool operator==(const TabState&) const = default;
};

struct EnvState {
    std::vector<TabState> tabs;
    std::size_t active = 0;
    std::map<std::string, std::string> world;  // server-side variables

    const TabState& active_tab() const { return tabs.at(active); }
    bool operator==(const EnvState&) const = default;
};

struct PageView {
    std::string url;
    std::string title;
    std::string dom_text;
    std::vector<ElementSpec> elements;
    std::size_t tab_count = 1;
    std::string state_digest;

    const ElementSpec* find_element(std::string_view ref) const;
    bool operator==(const PageView&) const = default;
};

struct StepResult {
    EnvState state;
    PageView view;
    bool navigated = false;
    bool matched = false;
};

EnvState reset(const SiteGraph& graph);

// Transition operator. Pure: the input state is never modified.
StepResult step(const EnvState& state, const SiteGraph& graph, const Action& action);

PageView observe(const EnvState& state, const SiteGraph& graph);

bool goal_check(const SiteGraph& graph, const EnvState& state, const std::optional<std::string>& answer);

// Digest over the full state (tabs, histories, active tab, world store).
std::string state_hash(const EnvState& state);

// Digest over the browser session only: everything except the world store.
std::string session_hash(const EnvState& state);

Json render_state(const EnvState& state);

Json render_element(const ElementSpec& element);
ElementSpec parse_element(const Json& doc, const std::string& where);
Json render_view(const PageView& view);

} // namespace bnb
