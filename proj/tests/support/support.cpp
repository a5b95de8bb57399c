#include "support.hpp"

#include <fmt/format.h>

#include <fstream>

namespace bnb::testing {

std::filesystem::path fixture(const std::string& relative) {
    return std::filesystem::path(BNB_FIXTURE_DIR) / relative;
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("bnb-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string Rng::word() {
    static const std::vector<std::string> words{"sales", "report", "admin", "q1", "2022", "brand", "filter",
                                                "panel", "kettle", "red", "user", "order", "page", "x"};
    return pick(words);
}

std::string Rng::text() {
    static const std::vector<std::string> pieces{"a", "b", "|", " ", "7:", "Q1 2022", "é", "", "||", "3"};
    std::string out;
    const std::size_t n = below(5);
    for (std::size_t i = 0; i < n; ++i) out += pick(pieces);
    return out;
}

Action random_action(Rng& rng) {
    auto ref = [&] { return "e" + std::to_string(rng.below(12)); };
    switch (rng.below(13)) {
    case 0: return act::Navigate{"http://s.local/" + rng.word() + "?q=" + rng.text()};
    case 1: return act::NavigateBack{};
    case 2: return act::NavigateForward{};
    case 3: return act::Click{ref()};
    case 4: return act::Type{ref(), rng.text()};
    case 5: return act::Select{ref(), rng.text()};
    case 6: return act::Hover{ref()};
    case 7: return act::Drag{ref(), ref()};
    case 8: return act::PressKey{rng.pick(std::vector<std::string>{"Enter", "Tab", "Escape", "ArrowDown"})};
    case 9: return act::TabNew{};
    case 10: return act::TabSelect{rng.below(4)};
    case 11: return act::TabClose{rng.below(4)};
    default: return act::Stop{rng.text()};
    }
}

Json random_site_doc(Rng& rng, std::size_t index) {
    const std::size_t n = rng.between(3, 8);
    auto url = [&](std::size_t p) { return fmt::format("http://r{}.test/p{}", index, p); };
    auto pid = [](std::size_t p) { return "p" + std::to_string(p); };

    Json pages = Json::object();
    Json transitions = Json::array();
    auto add = [&](std::size_t from, Json action, std::size_t to, bool navigates, const Json* effect = nullptr) {
        Json t{{"from", pid(from)}, {"action", std::move(action)}, {"to", pid(to)}, {"navigates", navigates}};
        if (effect) t["effect"] = *effect;
        transitions.push_back(std::move(t));
    };

    for (std::size_t p = 0; p < n; ++p) {
        Json elements = Json::array();
        const std::size_t links = rng.between(1, 3);
        for (std::size_t k = 0; k < links; ++k) {
            const std::size_t to = rng.below(n);
            const std::string ref = "l" + std::to_string(k);
            elements.push_back({{"ref", ref}, {"kind", "link"}, {"label", rng.word()}, {"href", url(to)}});
            add(p, {{"type", "CLICK"}, {"args", {{"element", ref}}}}, to, true);
        }
        const std::size_t fields = rng.below(3);
        for (std::size_t k = 0; k < fields; ++k) {
            const std::string ref = "f" + std::to_string(k);
            elements.push_back({{"ref", ref}, {"kind", "field"}, {"label", rng.word()}});
            // Occasionally a field submits to another page without a fresh load.
            const std::size_t to = rng.chance(0.2) ? rng.below(n) : p;
            add(p, {{"type", "TYPE"}, {"args", {{"element", ref}, {"text", "*"}}}}, to, false);
        }
        if (rng.chance(0.5)) {
            elements.push_back({{"ref", "s0"}, {"kind", "select"}, {"label", rng.word()},
                                {"options", Json::array({"one", "two", "three"})}});
            add(p, {{"type", "SELECT"}, {"args", {{"element", "s0"}, {"option", "one"}}}}, p, false);
            add(p, {{"type", "SELECT"}, {"args", {{"element", "s0"}, {"option", "two"}}}}, p, false);
        }
        if (rng.chance(0.6)) {
            elements.push_back({{"ref", "b0"}, {"kind", "button"}, {"label", rng.word()}});
            const Json effect{{"name", fmt::format("v{}", p)}, {"value", "on"}};
            const bool navigates = rng.chance(0.5);
            add(p, {{"type", "CLICK"}, {"args", {{"element", "b0"}}}}, navigates ? rng.below(n) : p, navigates,
                &effect);
        }
        if (rng.chance(0.3)) {
            elements.push_back({{"ref", "d0"}, {"kind", "draggable"}, {"label", rng.word()}});
        }
        pages[pid(p)] = Json{{"url", url(p)}, {"title", rng.word() + " " + rng.word()},
                             {"dom_text", rng.word() + " " + rng.word() + " " + rng.word()},
                             {"elements", std::move(elements)}};
    }
    return Json{{"schema_version", 1},
                {"name", fmt::format("random{}", index)},
                {"start", "p0"},
                {"pages", std::move(pages)},
                {"transitions", std::move(transitions)},
                {"goal", {{"type", "url_equals"}, {"url", url(n - 1)}}}};
}

Walk random_walk(Rng& rng, const SiteGraph& graph, std::size_t length) {
    Walk w;
    EnvState s = reset(graph);
    w.tau = Trajectory::start(s, graph);
    w.states.push_back(s);
    for (std::size_t i = 0; i < length; ++i) {
        const PageView view = observe(s, graph);
        std::vector<Action> options{act::NavigateBack{}, act::NavigateForward{}, act::TabNew{},
                                    act::TabSelect{rng.below(s.tabs.size())}, act::TabClose{rng.below(s.tabs.size())},
                                    act::PressKey{"Enter"}};
        const auto& page = *graph.page_by_url(view.url);
        options.push_back(act::Navigate{rng.pick(std::vector<std::string>{
            graph.pages.begin()->second.url, std::prev(graph.pages.end())->second.url, page.url})});
        for (const auto& el : view.elements) {
            switch (el.kind) {
            case ElementKind::Link:
            case ElementKind::Button:
                options.push_back(act::Click{el.ref});
                options.push_back(act::Click{el.ref});
                options.push_back(act::Hover{el.ref});
                break;
            case ElementKind::Field:
                options.push_back(act::Type{el.ref, rng.pick(std::vector<std::string>{"alpha", "b|c", "", "Q1 2022"})});
                options.push_back(act::Type{el.ref, rng.text()});
                break;
            case ElementKind::Select:
                options.push_back(act::Select{el.ref, rng.pick(el.options)});
                break;
            case ElementKind::Draggable:
                options.push_back(act::Drag{el.ref, el.ref});
                break;
            }
        }
        const Action a = rng.pick(options);
        StepResult r = step(s, graph, a);
        w.tau.extend(a, r, graph);
        s = r.state;
        w.states.push_back(s);
    }
    return w;
}

EnvState reexecute(const SiteGraph& graph, const std::vector<Action>& actions, std::size_t j,
                   const std::map<std::string, std::string>& world) {
    EnvState s = reset(graph);
    s.world = world;
    for (std::size_t i = 0; i < j; ++i) s = step(s, graph, actions[i]).state;
    return s;
}

std::vector<Json> read_trace(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::vector<Json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(Json::parse(line));
    }
    return out;
}

std::vector<Json> events(const std::vector<Json>& trace, const std::string& kind) {
    std::vector<Json> out;
    for (const auto& e : trace) {
        if (e.at("event") == kind) out.push_back(e);
    }
    return out;
}

} // namespace bnb::testing
