#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnb {

// Base of every error raised by the library. Subclasses exist so callers
// can catch a specific failure without string matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ── Documents ────────────────────────────────────────────────────────────────

// Malformed document. `position` is a byte offset for syntax errors and 0
// for schema errors; `where` names the offending field (JSON pointer) or file.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position, std::string where = {})
        : Error(message), position_(position), where_(std::move(where)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& where() const noexcept { return where_; }

private:
    std::size_t position_;
    std::string where_;
};

class UnknownVariant : public Error {
public:
    explicit UnknownVariant(const std::string& name)
        : Error("unknown action variant '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// ── Site graph / environment ─────────────────────────────────────────────────

class DanglingRef : public Error { using Error::Error; };
class DuplicateUrl : public Error { using Error::Error; };
class AmbiguousTransition : public Error { using Error::Error; };
class InvalidElement : public Error { using Error::Error; };
class InvalidTab : public Error { using Error::Error; };
class NavigateUnknownUrl : public Error { using Error::Error; };

// ── Replay ───────────────────────────────────────────────────────────────────

class IndexOutOfRange : public Error { using Error::Error; };
class ReplayDivergence : public Error { using Error::Error; };

// ── Memory cache ─────────────────────────────────────────────────────────────

class CacheCorrupt : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

// ── Search ───────────────────────────────────────────────────────────────────

class EmptyFrontier : public Error {
public:
    EmptyFrontier() : Error("frontier is empty") {}
};

class InvalidConfig : public Error { using Error::Error; };

// ── Reasoner ─────────────────────────────────────────────────────────────────

class ReasonerFailure : public Error { using Error::Error; };
class ReasonerTimeout : public ReasonerFailure { using ReasonerFailure::ReasonerFailure; };
class MalformedResponse : public ReasonerFailure { using ReasonerFailure::ReasonerFailure; };
class TransportError : public ReasonerFailure { using ReasonerFailure::ReasonerFailure; };

// ── Harness ──────────────────────────────────────────────────────────────────

class EmptySuite : public Error {
public:
    EmptySuite() : Error("suite manifest lists no tasks") {}
};

} // namespace bnb
