#pragma once

#include "bnb/action.hpp"
#include "bnb/env.hpp"
#include "bnb/evaluation.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bnb {

inline constexpr int kMemorySchemaVersion = 1;
inline constexpr std::size_t kProgressSummaryLimit = 2000;
inline constexpr std::size_t kSnapshotTextLimit = 1000;
inline constexpr std::size_t kSummaryActionLimit = 20;
inline constexpr double kRelevantScore = 0.5;

enum class Relevance { Relevant, Irrelevant, Unknown };

std::string_view relevance_name(Relevance r);

struct MemoryObjective {
    std::string global_intent;
    std::string active_subtask;

    bool operator==(const MemoryObjective&) const = default;
};

struct CycleRecord {
    std::size_t action_id = 0;
    std::string name;    // action variant name
    std::string ref;     // element ref, empty for non-element actions
    std::string result;

    bool operator==(const CycleRecord&) const = default;
};

struct PageSnapshot {
    std::string url;
    std::string title;
    std::string dom_text;   // whitespace-collapsed, truncated
    std::string image_ref;  // opaque; never decoded

    bool operator==(const PageSnapshot&) const = default;
};

struct ActionEntry {
    std::string signature;
    Relevance relevance = Relevance::Unknown;
    bool success = false;  // the action had an effect on the page
    std::string note;

    bool operator==(const ActionEntry&) const = default;
};

// Everything remembered about one URL.
struct PageMemory {
    std::string url;
    MemoryObjective objective;
    std::string progress_summary;
    std::vector<CycleRecord> history;
    PageSnapshot snapshot;
    std::vector<ActionEntry> action_memory;
    int version = kMemorySchemaVersion;

    const ActionEntry* find(std::string_view signature) const;
    bool is_irrelevant(std::string_view signature) const;
    bool operator==(const PageMemory&) const = default;
};

// Size-bounded projection handed to task decomposition.
struct PageSummary {
    std::string url;
    std::string title;
    std::string progress_summary;
    std::vector<std::string> visited_actions;

    bool operator==(const PageSummary&) const = default;
};

// One executed Reason-Act-Evaluation cycle on `page`.
struct CycleInput {
    PageView page;             // page the action was taken on
    MemoryObjective objective;
    std::string reason;        // proposal rationale
    Action action;
    std::string result;        // what happened, e.g. "navigated to ..."
    bool effective = false;    // the environment matched the action
    Evaluation eval;           // judgment of the resulting page
};

Relevance classify(const Evaluation& eval, double epsilon);
std::string compress_dom_text(std::string_view text);
std::string memory_filename(std::string_view url);

Json render_page_memory(const PageMemory& memory);
PageMemory parse_page_memory(const Json& doc);  // CacheCorrupt on any defect

// Per-URL memory. Single writer; copies are cheap snapshots for readers.
// With a cache directory every record is written through as
// <dir>/<sha256(url)>.mem and unseen URLs are looked up on disk.
class MemoryStore {
public:
    MemoryStore() = default;
    explicit MemoryStore(std::filesystem::path cache_dir);

    const PageMemory& record_cycle(const CycleInput& input, double epsilon);
    // Overwrites the relevance of a remembered action; no-op if unknown.
    void reclassify(std::string_view url, std::string_view signature, Relevance relevance);

    // In-run record or on-disk cache entry; a corrupt cache file is treated
    // as absent and reported through warnings().
    std::optional<PageMemory> load_for_url(std::string_view url);
    // Read-only lookup of the in-run records.
    const PageMemory* find(std::string_view url) const;

    std::vector<PageSummary> summaries_for_decomposition() const;

    void insert(PageMemory memory);
    const std::map<std::string, PageMemory, std::less<>>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    const std::optional<std::filesystem::path>& cache_dir() const noexcept { return cache_dir_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    // Deep equality of the records; cache location and warnings are ignored.
    bool operator==(const MemoryStore& other) const { return records_ == other.records_; }

private:
    void write_through(const PageMemory& memory);

    std::map<std::string, PageMemory, std::less<>> records_;
    std::optional<std::filesystem::path> cache_dir_;
    std::vector<std::string> warnings_;
};

// One document per URL; the directory is created if needed.
void persist(const MemoryStore& store, const std::filesystem::path& dir);
// Corrupt files are skipped and listed in the returned store's warnings().
MemoryStore restore(const std::filesystem::path& dir);

} // namespace bnb
