#pragma once

#include "json.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace bnb {

using Json = nlohmann::json;

// Reserved separator of action signatures. Element refs and key names may not
// contain it; free text fields are length-prefixed instead.
inline constexpr char kSignatureDelimiter = '|';

namespace act {

struct Navigate        { std::string url;                         bool operator==(const Navigate&) const = default; };
struct NavigateBack    {                                          bool operator==(const NavigateBack&) const = default; };
struct NavigateForward {                                          bool operator==(const NavigateForward&) const = default; };
struct Click           { std::string element;                     bool operator==(const Click&) const = default; };
struct Type            { std::string element; std::string text;   bool operator==(const Type&) const = default; };
struct Select          { std::string element; std::string option; bool operator==(const Select&) const = default; };
struct Hover           { std::string element;                     bool operator==(const Hover&) const = default; };
struct Drag            { std::string source; std::string target;  bool operator==(const Drag&) const = default; };
struct PressKey        { std::string key;                         bool operator==(const PressKey&) const = default; };
struct TabNew          {                                          bool operator==(const TabNew&) const = default; };
struct TabSelect       { std::size_t id = 0;                      bool operator==(const TabSelect&) const = default; };
struct TabClose        { std::size_t id = 0;                      bool operator==(const TabClose&) const = default; };
// Terminal answer. Not a browser operation; carries the text the goal check reads.
struct Stop            { std::string answer;                      bool operator==(const Stop&) const = default; };

} // namespace act

enum class ActionKind {
    Navigate,
    NavigateBack,
    NavigateForward,
    Click,
    Type,
    Select,
    Hover,
    Drag,
    PressKey,
    TabNew,
    TabSelect,
    TabClose,
    Stop,
};

std::string_view action_kind_name(ActionKind kind);
std::optional<ActionKind> action_kind_from_name(std::string_view name);

// One atomic web operation. Immutable value type.
class Action {
public:
    using Variant = std::variant<act::Navigate, act::NavigateBack, act::NavigateForward, act::Click,
                                 act::Type, act::Select, act::Hover, act::Drag, act::PressKey,
                                 act::TabNew, act::TabSelect, act::TabClose, act::Stop>;

    Action() : value_(act::NavigateBack{}) {}

    template <typename T>
        requires std::is_constructible_v<Variant, T>
    Action(T value) : value_(std::move(value)) {}

    ActionKind kind() const noexcept { return static_cast<ActionKind>(value_.index()); }
    std::string_view name() const { return action_kind_name(kind()); }
    const Variant& variant() const noexcept { return value_; }

    template <typename T>
    const T* get_if() const noexcept { return std::get_if<T>(&value_); }

    // Element the action is aimed at (DRAG reports its source), if any.
    std::optional<std::string_view> element() const;

    bool operator==(const Action&) const = default;

private:
    Variant value_;
};

// Canonical injective text form, e.g. "CLICK|e12", "TYPE|e_q|7:Q1 2022".
std::string action_signature(const Action& action);

// True when every element ref / key is non-empty and free of the delimiter.
bool is_well_formed(const Action& action);

// Wire form: {"type": <name>, "args": {...}}.
Json render_action(const Action& action);
Action parse_action(const Json& doc);
Action parse_action(std::string_view text);

// Short human-readable form used in logs, e.g. CLICK(e12).
std::string describe(const Action& action);

} // namespace bnb
