#pragma once

#include "bnb/action.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>

namespace bnb {

inline constexpr int kTraceSchemaVersion = 1;

// Ordered event log, one JSON object per line. Every event carries a
// sequence number and its type; nothing time-dependent is written.
class TraceSink {
public:
    TraceSink() = default;  // discards events
    explicit TraceSink(std::ostream& out) : out_(&out) {}
    explicit TraceSink(const std::filesystem::path& file);

    void emit(const std::string& event, Json fields = Json::object());
    std::size_t count() const noexcept { return seq_; }
    bool enabled() const noexcept { return out_ != nullptr; }

private:
    std::ofstream file_;
    std::ostream* out_ = nullptr;
    std::size_t seq_ = 0;
    std::mutex mu_;
};

} // namespace bnb
