#include "bnb/action.hpp"

#include "bnb/error.hpp"

#include <array>
#include <utility>

namespace bnb {

namespace {

constexpr std::array<std::string_view, 13> kKindNames = {
    "NAVIGATE", "NAVIGATE_BACK", "NAVIGATE_FORWARD", "CLICK",   "TYPE",      "SELECT",    "HOVER",
    "DRAG",     "PRESS_KEY",     "TAB_NEW",          "TAB_SELECT", "TAB_CLOSE", "STOP",
};

template <class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void append_ref(std::string& out, std::string_view ref) {
    out += kSignatureDelimiter;
    out += ref;
}

void append_text(std::string& out, std::string_view text) {
    out += kSignatureDelimiter;
    out += std::to_string(text.size());
    out += ':';
    out += text;
}

bool valid_ref(std::string_view ref) {
    return !ref.empty() && ref.find(kSignatureDelimiter) == std::string_view::npos;
}

// ── wire parsing helpers ─────────────────────────────────────────────────────

const Json& require_field(const Json& args, const char* field) {
    auto it = args.find(field);
    if (it == args.end()) {
        throw ParseError(std::string("missing required field '") + field + "'", 0,
                         std::string("/args/") + field);
    }
    return *it;
}

std::string string_arg(const Json& args, const char* field) {
    const Json& v = require_field(args, field);
    if (!v.is_string()) {
        throw ParseError(std::string("field '") + field + "' must be a string", 0,
                         std::string("/args/") + field);
    }
    return v.get<std::string>();
}

std::string ref_arg(const Json& args, const char* field) {
    std::string ref = string_arg(args, field);
    if (!valid_ref(ref)) {
        throw ParseError(std::string("field '") + field + "' is not a valid reference", 0,
                         std::string("/args/") + field);
    }
    return ref;
}

std::size_t index_arg(const Json& args, const char* field) {
    const Json& v = require_field(args, field);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(std::string("field '") + field + "' must be a non-negative integer", 0,
                         std::string("/args/") + field);
    }
    return v.get<std::size_t>();
}

void expect_args(const Json& args, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : args.items()) {
        bool known = false;
        for (auto a : allowed) known = known || a == key;
        if (!known) throw ParseError("unexpected argument '" + key + "'", 0, "/args/" + key);
    }
}

} // namespace

std::string_view action_kind_name(ActionKind kind) {
    return kKindNames.at(static_cast<std::size_t>(kind));
}

std::optional<ActionKind> action_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) return static_cast<ActionKind>(i);
    }
    return std::nullopt;
}

std::optional<std::string_view> Action::element() const {
    return std::visit(overloaded{
                          [](const act::Click& a) -> std::optional<std::string_view> { return a.element; },
                          [](const act::Type& a) -> std::optional<std::string_view> { return a.element; },
                          [](const act::Select& a) -> std::optional<std::string_view> { return a.element; },
                          [](const act::Hover& a) -> std::optional<std::string_view> { return a.element; },
                          [](const act::Drag& a) -> std::optional<std::string_view> { return a.source; },
                          [](const auto&) -> std::optional<std::string_view> { return std::nullopt; },
                      },
                      value_);
}

std::string action_signature(const Action& action) {
    std::string out(action.name());
    std::visit(overloaded{
                   [&](const act::Navigate& a) { append_text(out, a.url); },
                   [&](const act::Click& a) { append_ref(out, a.element); },
                   [&](const act::Type& a) {
                       append_ref(out, a.element);
                       append_text(out, a.text);
                   },
                   [&](const act::Select& a) {
                       append_ref(out, a.element);
                       append_text(out, a.option);
                   },
                   [&](const act::Hover& a) { append_ref(out, a.element); },
                   [&](const act::Drag& a) {
                       append_ref(out, a.source);
                       append_ref(out, a.target);
                   },
                   [&](const act::PressKey& a) { append_ref(out, a.key); },
                   [&](const act::TabSelect& a) { append_ref(out, std::to_string(a.id)); },
                   [&](const act::TabClose& a) { append_ref(out, std::to_string(a.id)); },
                   [&](const act::Stop& a) { append_text(out, a.answer); },
                   [](const auto&) {},
               },
               action.variant());
    return out;
}

bool is_well_formed(const Action& action) {
    return std::visit(overloaded{
                          [](const act::Click& a) { return valid_ref(a.element); },
                          [](const act::Type& a) { return valid_ref(a.element); },
                          [](const act::Select& a) { return valid_ref(a.element); },
                          [](const act::Hover& a) { return valid_ref(a.element); },
                          [](const act::Drag& a) { return valid_ref(a.source) && valid_ref(a.target); },
                          [](const act::PressKey& a) { return valid_ref(a.key); },
                          [](const act::Navigate& a) { return !a.url.empty(); },
                          [](const auto&) { return true; },
                      },
                      action.variant());
}

Json render_action(const Action& action) {
    Json args = Json::object();
    std::visit(overloaded{
                   [&](const act::Navigate& a) { args["url"] = a.url; },
                   [&](const act::Click& a) { args["element"] = a.element; },
                   [&](const act::Type& a) {
                       args["element"] = a.element;
                       args["text"] = a.text;
                   },
                   [&](const act::Select& a) {
                       args["element"] = a.element;
                       args["option"] = a.option;
                   },
                   [&](const act::Hover& a) { args["element"] = a.element; },
                   [&](const act::Drag& a) {
                       args["source"] = a.source;
                       args["target"] = a.target;
                   },
                   [&](const act::PressKey& a) { args["key"] = a.key; },
                   [&](const act::TabSelect& a) { args["id"] = a.id; },
                   [&](const act::TabClose& a) { args["id"] = a.id; },
                   [&](const act::Stop& a) { args["answer"] = a.answer; },
                   [](const auto&) {},
               },
               action.variant());
    return Json{{"type", std::string(action.name())}, {"args", std::move(args)}};
}

Action parse_action(const Json& doc) {
    if (!doc.is_object()) throw ParseError("action document must be an object", 0, "/");
    auto type_it = doc.find("type");
    if (type_it == doc.end() || !type_it->is_string()) {
        throw ParseError("missing required field 'type'", 0, "/type");
    }
    const auto name = type_it->get<std::string>();
    const auto kind = action_kind_from_name(name);
    if (!kind) throw UnknownVariant(name);

    static const Json kEmpty = Json::object();
    const Json* args = &kEmpty;
    if (auto it = doc.find("args"); it != doc.end()) {
        if (!it->is_object()) throw ParseError("field 'args' must be an object", 0, "/args");
        args = &*it;
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "type" && key != "args") throw ParseError("unexpected field '" + key + "'", 0, "/" + key);
    }

    switch (*kind) {
    case ActionKind::Navigate: {
        expect_args(*args, {"url"});
        auto url = string_arg(*args, "url");
        if (url.empty()) throw ParseError("field 'url' must not be empty", 0, "/args/url");
        return act::Navigate{std::move(url)};
    }
    case ActionKind::NavigateBack: expect_args(*args, {}); return act::NavigateBack{};
    case ActionKind::NavigateForward: expect_args(*args, {}); return act::NavigateForward{};
    case ActionKind::Click: expect_args(*args, {"element"}); return act::Click{ref_arg(*args, "element")};
    case ActionKind::Type:
        expect_args(*args, {"element", "text"});
        return act::Type{ref_arg(*args, "element"), string_arg(*args, "text")};
    case ActionKind::Select:
        expect_args(*args, {"element", "option"});
        return act::Select{ref_arg(*args, "element"), string_arg(*args, "option")};
    case ActionKind::Hover: expect_args(*args, {"element"}); return act::Hover{ref_arg(*args, "element")};
    case ActionKind::Drag:
        expect_args(*args, {"source", "target"});
        return act::Drag{ref_arg(*args, "source"), ref_arg(*args, "target")};
    case ActionKind::PressKey: expect_args(*args, {"key"}); return act::PressKey{ref_arg(*args, "key")};
    case ActionKind::TabNew: expect_args(*args, {}); return act::TabNew{};
    case ActionKind::TabSelect: expect_args(*args, {"id"}); return act::TabSelect{index_arg(*args, "id")};
    case ActionKind::TabClose: expect_args(*args, {"id"}); return act::TabClose{index_arg(*args, "id")};
    case ActionKind::Stop: expect_args(*args, {"answer"}); return act::Stop{string_arg(*args, "answer")};
    }
    throw UnknownVariant(name);
}

Action parse_action(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    return parse_action(doc);
}

std::string describe(const Action& action) {
    std::string out(action.name());
    std::string inner;
    auto add = [&](std::string_view s) {
        if (!inner.empty()) inner += ", ";
        inner += s;
    };
    std::visit(overloaded{
                   [&](const act::Navigate& a) { add(a.url); },
                   [&](const act::Click& a) { add(a.element); },
                   [&](const act::Type& a) { add(a.element); add('"' + a.text + '"'); },
                   [&](const act::Select& a) { add(a.element); add('"' + a.option + '"'); },
                   [&](const act::Hover& a) { add(a.element); },
                   [&](const act::Drag& a) { add(a.source); add(a.target); },
                   [&](const act::PressKey& a) { add(a.key); },
                   [&](const act::TabSelect& a) { add(std::to_string(a.id)); },
                   [&](const act::TabClose& a) { add(std::to_string(a.id)); },
                   [&](const act::Stop& a) { add('"' + a.answer + '"'); },
                   [](const auto&) {},
               },
               action.variant());
    return out + "(" + inner + ")";
}

} // namespace bnb
