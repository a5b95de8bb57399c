#include "bnb/env.hpp"

#include "bnb/digest.hpp"
#include "bnb/error.hpp"
#include "bnb/json_util.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace bnb {

namespace {

constexpr std::array<std::string_view, 5> kElementKindNames = {"link", "button", "field", "select", "draggable"};

ElementKind element_kind_from_name(std::string_view name, const std::string& where) {
    for (std::size_t i = 0; i < kElementKindNames.size(); ++i) {
        if (kElementKindNames[i] == name) return static_cast<ElementKind>(i);
    }
    throw ParseError("unknown element kind '" + std::string(name) + "'", 0, where);
}

bool is_form_element(const ElementSpec& e) {
    return e.kind == ElementKind::Field || e.kind == ElementKind::Select;
}

bool is_element_action(ActionKind kind) {
    switch (kind) {
    case ActionKind::Click:
    case ActionKind::Type:
    case ActionKind::Select:
    case ActionKind::Hover:
    case ActionKind::Drag:
    case ActionKind::PressKey:
        return true;
    default:
        return false;
    }
}

// Two patterns on the same page overlap when some concrete action matches both.
bool patterns_overlap(const TransitionSpec& a, const TransitionSpec& b) {
    if (a.pattern == b.pattern) return true;
    const auto* ta = a.pattern.get_if<act::Type>();
    const auto* tb = b.pattern.get_if<act::Type>();
    if (ta && tb && ta->element == tb->element) return a.is_wildcard() || b.is_wildcard();
    return false;
}

void require_element(const PageSpec& page, std::string_view ref) {
    if (!page.find_element(ref)) {
        throw InvalidElement("element '" + std::string(ref) + "' is not on page '" + page.id + "'");
    }
}

// Keeps only form entries the destination page can hold.
void restrict_form_state(TabState& tab, const PageSpec& page) {
    for (auto it = tab.form_state.begin(); it != tab.form_state.end();) {
        const auto* e = page.find_element(it->first);
        if (e && is_form_element(*e)) {
            ++it;
        } else {
            it = tab.form_state.erase(it);
        }
    }
}

void navigate_tab(TabState& tab, const std::string& to) {
    tab.back.push_back(tab.page);
    tab.forward.clear();
    tab.page = to;
    tab.form_state.clear();
}

Json render_tab(const TabState& tab, bool with_history = true) {
    Json j{{"page", tab.page}, {"form", tab.form_state}};
    if (with_history) {
        j["back"] = tab.back;
        j["forward"] = tab.forward;
    }
    return j;
}

Json render_session(const EnvState& state) {
    Json tabs = Json::array();
    for (const auto& t : state.tabs) tabs.push_back(render_tab(t));
    return Json{{"active", state.active}, {"tabs", std::move(tabs)}};
}

} // namespace

std::string_view element_kind_name(ElementKind kind) {
    return kElementKindNames.at(static_cast<std::size_t>(kind));
}

const ElementSpec* PageSpec::find_element(std::string_view ref) const {
    for (const auto& e : elements) {
        if (e.ref == ref) return &e;
    }
    return nullptr;
}

const ElementSpec* PageView::find_element(std::string_view ref) const {
    for (const auto& e : elements) {
        if (e.ref == ref) return &e;
    }
    return nullptr;
}

bool TransitionSpec::is_wildcard() const {
    const auto* t = pattern.get_if<act::Type>();
    return t && t->text == kWildcard;
}

bool TransitionSpec::matches(const Action& concrete) const {
    if (pattern == concrete) return true;
    if (!is_wildcard()) return false;
    const auto* t = concrete.get_if<act::Type>();
    return t && t->element == pattern.get_if<act::Type>()->element;
}

// ── goals ────────────────────────────────────────────────────────────────────

Json render_goal(const GoalSpec& goal) {
    return std::visit(
        [](const auto& g) -> Json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, goal::UrlEquals>) {
                return Json{{"type", "url_equals"}, {"url", g.url}};
            } else if constexpr (std::is_same_v<T, goal::WorldVarEquals>) {
                return Json{{"type", "world_var_equals"}, {"name", g.name}, {"value", g.value}};
            } else {
                return Json{{"type", "answer_contains"}, {"substring", g.substring}};
            }
        },
        goal);
}

GoalSpec parse_goal(const Json& doc, const std::string& where) {
    const auto type = jsonu::require_string(doc, "type", where);
    if (type == "url_equals") return goal::UrlEquals{jsonu::require_string(doc, "url", where)};
    if (type == "world_var_equals") {
        return goal::WorldVarEquals{jsonu::require_string(doc, "name", where),
                                    jsonu::require_string(doc, "value", where)};
    }
    if (type == "answer_contains") return goal::AnswerContains{jsonu::require_string(doc, "substring", where)};
    throw ParseError("unknown goal type '" + type + "'", 0, where + "/type");
}

// ── site graph ───────────────────────────────────────────────────────────────

const PageSpec& SiteGraph::page(std::string_view id) const {
    auto it = pages.find(std::string(id));
    if (it == pages.end()) throw DanglingRef("unknown page '" + std::string(id) + "'");
    return it->second;
}

const PageSpec* SiteGraph::page_by_url(std::string_view url) const {
    for (const auto& [_, p] : pages) {
        if (p.url == url) return &p;
    }
    return nullptr;
}

const TransitionSpec* SiteGraph::match(std::string_view page_id, const Action& action) const {
    for (const auto& t : transitions) {
        if (t.from == page_id && t.matches(action)) return &t;
    }
    return nullptr;
}

void validate(const SiteGraph& graph) {
    if (graph.pages.empty()) throw ParseError("site has no pages", 0, "/pages");
    if (!graph.pages.count(graph.start)) throw DanglingRef("start page '" + graph.start + "' does not exist");

    std::set<std::string> urls;
    for (const auto& [id, page] : graph.pages) {
        if (page.id != id) throw ParseError("page id mismatch for '" + id + "'", 0, "/pages/" + id);
        if (!urls.insert(page.url).second) throw DuplicateUrl("url '" + page.url + "' is used by more than one page");
        std::set<std::string> refs;
        for (const auto& e : page.elements) {
            if (e.ref.empty() || e.ref.find(kSignatureDelimiter) != std::string::npos) {
                throw ParseError("invalid element ref '" + e.ref + "'", 0, "/pages/" + id + "/elements");
            }
            if (!refs.insert(e.ref).second) {
                throw ParseError("duplicate element ref '" + e.ref + "'", 0, "/pages/" + id + "/elements");
            }
        }
    }
    for (const auto& [id, page] : graph.pages) {
        for (const auto& e : page.elements) {
            if (e.href && !graph.page_by_url(*e.href)) {
                throw DanglingRef("element '" + e.ref + "' on page '" + id + "' links to unknown url '" + *e.href + "'");
            }
        }
    }

    for (std::size_t i = 0; i < graph.transitions.size(); ++i) {
        const auto& t = graph.transitions[i];
        const std::string where = "/transitions/" + std::to_string(i);
        auto from = graph.pages.find(t.from);
        if (from == graph.pages.end()) throw DanglingRef(where + ": unknown source page '" + t.from + "'");
        if (!graph.pages.count(t.to)) throw DanglingRef(where + ": unknown target page '" + t.to + "'");
        if (!is_element_action(t.pattern.kind())) {
            throw ParseError("transition pattern must be an element or key action", 0, where + "/action");
        }
        auto check_ref = [&](std::string_view ref) {
            if (!from->second.find_element(ref)) {
                throw DanglingRef(where + ": element '" + std::string(ref) + "' is not on page '" + t.from + "'");
            }
        };
        if (const auto* d = t.pattern.get_if<act::Drag>()) {
            check_ref(d->source);
            check_ref(d->target);
        } else if (auto ref = t.pattern.element()) {
            check_ref(*ref);
        }
        if (t.effect && t.effect->value == kWildcard && !t.is_wildcard()) {
            throw ParseError("only wildcard TYPE transitions may bind '*' into an effect", 0, where + "/effect");
        }
        for (std::size_t k = 0; k < i; ++k) {
            const auto& other = graph.transitions[k];
            if (other.from == t.from && patterns_overlap(other, t)) {
                throw AmbiguousTransition(where + " overlaps transition " + std::to_string(k) + " on page '" +
                                          t.from + "' for " + describe(t.pattern));
            }
        }
    }
}

ElementSpec parse_element(const Json& doc, const std::string& where) {
    ElementSpec e;
    e.ref = jsonu::require_string(doc, "ref", where);
    e.kind = element_kind_from_name(jsonu::require_string(doc, "kind", where), where + "/kind");
    e.label = jsonu::require_string(doc, "label", where);
    e.href = jsonu::optional_string(doc, "href", where);
    if (const Json* opts = jsonu::optional(doc, "options")) e.options = jsonu::string_list(*opts, where + "/options");
    return e;
}

Json render_element(const ElementSpec& e) {
    Json j{{"ref", e.ref}, {"kind", std::string(element_kind_name(e.kind))}, {"label", e.label}};
    if (e.href) j["href"] = *e.href;
    if (!e.options.empty()) j["options"] = e.options;
    return j;
}

SiteGraph load_site_graph(const Json& doc) {
    jsonu::require_object(doc, "/");
    const auto version = jsonu::require_int(doc, "schema_version", "/");
    if (version != kSiteSchemaVersion) {
        throw ParseError("unsupported schema_version " + std::to_string(version), 0, "/schema_version");
    }
    SiteGraph g;
    g.name = jsonu::optional_string(doc, "name", "/").value_or("");
    g.start = jsonu::require_string(doc, "start", "/");

    const Json& pages = jsonu::require(doc, "pages", "/");
    jsonu::require_object(pages, "/pages");
    for (const auto& [id, p] : pages.items()) {
        const std::string where = "/pages/" + id;
        PageSpec page;
        page.id = id;
        page.url = jsonu::require_string(p, "url", where);
        page.title = jsonu::require_string(p, "title", where);
        page.dom_text = jsonu::optional_string(p, "dom_text", where).value_or("");
        if (const Json* elems = jsonu::optional(p, "elements")) {
            jsonu::require_array(*elems, where + "/elements");
            for (std::size_t i = 0; i < elems->size(); ++i) {
                page.elements.push_back(parse_element((*elems)[i], where + "/elements/" + std::to_string(i)));
            }
        }
        g.pages.emplace(id, std::move(page));
    }

    if (const Json* ts = jsonu::optional(doc, "transitions")) {
        jsonu::require_array(*ts, "/transitions");
        for (std::size_t i = 0; i < ts->size(); ++i) {
            const std::string where = "/transitions/" + std::to_string(i);
            const Json& t = (*ts)[i];
            TransitionSpec spec;
            spec.from = jsonu::require_string(t, "from", where);
            spec.to = jsonu::require_string(t, "to", where);
            spec.navigates = jsonu::require_bool(t, "navigates", where);
            try {
                spec.pattern = parse_action(jsonu::require(t, "action", where));
            } catch (const ParseError& e) {
                throw ParseError(e.what(), 0, where + "/action" + e.where());
            }
            if (const Json* eff = jsonu::optional(t, "effect")) {
                spec.effect = WorldEffect{jsonu::require_string(*eff, "name", where + "/effect"),
                                          jsonu::require_string(*eff, "value", where + "/effect")};
            }
            g.transitions.push_back(std::move(spec));
        }
    }
    g.goal = parse_goal(jsonu::require(doc, "goal", "/"));
    validate(g);
    return g;
}

SiteGraph load_site_graph(const std::filesystem::path& file) {
    const Json doc = jsonu::read_file(file);
    try {
        return load_site_graph(doc);
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what() + " at " + e.where(), e.position(),
                         file.string() + "#" + e.where());
    }
}

Json render_site_graph(const SiteGraph& graph) {
    Json pages = Json::object();
    for (const auto& [id, p] : graph.pages) {
        Json elems = Json::array();
        for (const auto& e : p.elements) elems.push_back(render_element(e));
        pages[id] = Json{{"url", p.url}, {"title", p.title}, {"dom_text", p.dom_text}, {"elements", elems}};
    }
    Json transitions = Json::array();
    for (const auto& t : graph.transitions) {
        Json j{{"from", t.from}, {"action", render_action(t.pattern)}, {"to", t.to}, {"navigates", t.navigates}};
        if (t.effect) j["effect"] = Json{{"name", t.effect->name}, {"value", t.effect->value}};
        transitions.push_back(std::move(j));
    }
    return Json{{"schema_version", kSiteSchemaVersion},
                {"name", graph.name},
                {"start", graph.start},
                {"pages", std::move(pages)},
                {"transitions", std::move(transitions)},
                {"goal", render_goal(graph.goal)}};
}

// ── state & transition operator ──────────────────────────────────────────────

EnvState reset(const SiteGraph& graph) {
    EnvState s;
    s.tabs.push_back(TabState{graph.start, {}, {}, {}});
    s.active = 0;
    return s;
}

StepResult step(const EnvState& state, const SiteGraph& graph, const Action& action) {
    StepResult r{state, {}, false, true};
    EnvState& next = r.state;
    TabState& tab = next.tabs.at(next.active);
    const PageSpec& page = graph.page(tab.page);

    switch (action.kind()) {
    case ActionKind::Navigate: {
        const auto& nav = *action.get_if<act::Navigate>();
        const PageSpec* target = graph.page_by_url(nav.url);
        if (!target) throw NavigateUnknownUrl("no page has url '" + nav.url + "'");
        navigate_tab(tab, target->id);
        r.navigated = true;
        break;
    }
    case ActionKind::NavigateBack:
    case ActionKind::NavigateForward: {
        const bool back = action.kind() == ActionKind::NavigateBack;
        auto& from_stack = back ? tab.back : tab.forward;
        auto& to_stack = back ? tab.forward : tab.back;
        if (from_stack.empty()) {
            r.matched = false;
            break;
        }
        to_stack.push_back(tab.page);
        tab.page = from_stack.back();
        from_stack.pop_back();
        tab.form_state.clear();
        r.navigated = true;
        break;
    }
    case ActionKind::TabNew:
        next.tabs.push_back(TabState{graph.start, {}, {}, {}});
        next.active = next.tabs.size() - 1;
        break;
    case ActionKind::TabSelect: {
        const auto id = action.get_if<act::TabSelect>()->id;
        if (id >= next.tabs.size()) throw InvalidTab("tab " + std::to_string(id) + " does not exist");
        next.active = id;
        break;
    }
    case ActionKind::TabClose: {
        const auto id = action.get_if<act::TabClose>()->id;
        if (id >= next.tabs.size()) throw InvalidTab("tab " + std::to_string(id) + " does not exist");
        if (next.tabs.size() == 1) {
            r.matched = false;  // the last tab stays open
            break;
        }
        next.tabs.erase(next.tabs.begin() + static_cast<std::ptrdiff_t>(id));
        if (id < next.active || next.active >= next.tabs.size()) --next.active;
        break;
    }
    case ActionKind::Stop:
        break;
    default: {
        if (const auto* d = action.get_if<act::Drag>()) {
            require_element(page, d->source);
            require_element(page, d->target);
        } else if (auto ref = action.element()) {
            require_element(page, *ref);
        }
        const TransitionSpec* t = graph.match(tab.page, action);
        if (!t) {
            r.matched = false;
            break;
        }
        const PageSpec& dest = graph.page(t->to);
        if (t->navigates) {
            navigate_tab(tab, t->to);
            r.navigated = true;
        } else {
            tab.page = t->to;
            if (t->to != t->from) restrict_form_state(tab, dest);
            std::optional<std::pair<std::string, std::string>> entry;
            if (const auto* ty = action.get_if<act::Type>()) entry.emplace(ty->element, ty->text);
            if (const auto* se = action.get_if<act::Select>()) entry.emplace(se->element, se->option);
            if (entry) {
                const auto* e = dest.find_element(entry->first);
                if (e && is_form_element(*e)) tab.form_state[entry->first] = entry->second;
            }
        }
        if (t->effect) {
            std::string value = t->effect->value;
            if (value == kWildcard) value = action.get_if<act::Type>()->text;
            next.world[t->effect->name] = std::move(value);
        }
        break;
    }
    }

    if (!r.matched) r.state = state;
    r.view = observe(r.state, graph);
    return r;
}

PageView observe(const EnvState& state, const SiteGraph& graph) {
    const PageSpec& page = graph.page(state.active_tab().page);
    return PageView{page.url, page.title, page.dom_text, page.elements, state.tabs.size(), state_hash(state)};
}

bool goal_check(const SiteGraph& graph, const EnvState& state, const std::optional<std::string>& answer) {
    return std::visit(
        [&](const auto& g) -> bool {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, goal::UrlEquals>) {
                return graph.page(state.active_tab().page).url == g.url;
            } else if constexpr (std::is_same_v<T, goal::WorldVarEquals>) {
                auto it = state.world.find(g.name);
                return it != state.world.end() && it->second == g.value;
            } else {
                return answer && answer->find(g.substring) != std::string::npos;
            }
        },
        graph.goal);
}

Json render_state(const EnvState& state) {
    Json j = render_session(state);
    j["world"] = state.world;
    return j;
}

std::string state_hash(const EnvState& state) {
    return sha256_hex(render_state(state).dump());
}

std::string session_hash(const EnvState& state) {
    return sha256_hex(render_session(state).dump());
}

Json render_view(const PageView& view) {
    Json elems = Json::array();
    for (const auto& e : view.elements) elems.push_back(render_element(e));
    return Json{{"url", view.url},
                {"title", view.title},
                {"dom_text", view.dom_text},
                {"elements", std::move(elems)},
                {"tab_count", view.tab_count},
                {"state_digest", view.state_digest}};
}

} // namespace bnb
