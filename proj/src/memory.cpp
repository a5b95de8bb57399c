#include "bnb/memory.hpp"

#include "bnb/digest.hpp"
#include "bnb/error.hpp"
#include "bnb/json_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <system_error>

namespace bnb {

namespace {

Relevance relevance_from_name(std::string_view name) {
    if (name == "relevant") return Relevance::Relevant;
    if (name == "irrelevant") return Relevance::Irrelevant;
    if (name == "unknown") return Relevance::Unknown;
    throw ParseError("unknown relevance '" + std::string(name) + "'", 0, "relevance");
}

std::string describe_effect(const CycleInput& in) {
    if (!in.effective) return "no effect";
    return in.result;
}

} // namespace

Evaluation clamped(Evaluation eval) {
    if (std::isnan(eval.score)) eval.score = 0.0;
    eval.score = std::clamp(eval.score, 0.0, 1.0);
    return eval;
}

std::string_view relevance_name(Relevance r) {
    switch (r) {
    case Relevance::Relevant: return "relevant";
    case Relevance::Irrelevant: return "irrelevant";
    case Relevance::Unknown: return "unknown";
    }
    return "unknown";
}

const ActionEntry* PageMemory::find(std::string_view signature) const {
    for (const auto& e : action_memory) {
        if (e.signature == signature) return &e;
    }
    return nullptr;
}

bool PageMemory::is_irrelevant(std::string_view signature) const {
    const auto* e = find(signature);
    return e && e->relevance == Relevance::Irrelevant;
}

Relevance classify(const Evaluation& eval, double epsilon) {
    if (eval.subtask_done) return Relevance::Relevant;
    if (eval.score < epsilon) return Relevance::Irrelevant;
    if (eval.score >= kRelevantScore) return Relevance::Relevant;
    return Relevance::Unknown;
}

std::string compress_dom_text(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += ch;
        if (out.size() >= kSnapshotTextLimit) break;
    }
    if (out.size() > kSnapshotTextLimit) out.resize(kSnapshotTextLimit);
    return out;
}

std::string memory_filename(std::string_view url) {
    return sha256_hex(url) + ".mem";
}

Json render_page_memory(const PageMemory& m) {
    Json history = Json::array();
    for (const auto& r : m.history) {
        history.push_back(Json{{"action_id", r.action_id}, {"name", r.name}, {"ref", r.ref}, {"result", r.result}});
    }
    Json actions = Json::array();
    for (const auto& a : m.action_memory) {
        actions.push_back(Json{{"signature", a.signature},
                               {"relevance", std::string(relevance_name(a.relevance))},
                               {"success", a.success},
                               {"note", a.note}});
    }
    return Json{
        {"schema_version", m.version},
        {"url", m.url},
        {"objective", {{"global_intent", m.objective.global_intent}, {"active_subtask", m.objective.active_subtask}}},
        {"progress_summary", m.progress_summary},
        {"history", std::move(history)},
        {"snapshot",
         {{"url", m.snapshot.url},
          {"title", m.snapshot.title},
          {"dom_text", m.snapshot.dom_text},
          {"image_ref", m.snapshot.image_ref}}},
        {"action_memory", std::move(actions)},
    };
}

PageMemory parse_page_memory(const Json& doc) {
    try {
        PageMemory m;
        m.version = static_cast<int>(jsonu::require_int(doc, "schema_version", "/"));
        if (m.version != kMemorySchemaVersion) {
            throw CacheCorrupt("page memory schema_version " + std::to_string(m.version) + " is not supported");
        }
        m.url = jsonu::require_string(doc, "url", "/");
        const Json& obj = jsonu::require(doc, "objective", "/");
        m.objective.global_intent = jsonu::require_string(obj, "global_intent", "/objective");
        m.objective.active_subtask = jsonu::require_string(obj, "active_subtask", "/objective");
        m.progress_summary = jsonu::require_string(doc, "progress_summary", "/");

        const Json& history = jsonu::require(doc, "history", "/");
        jsonu::require_array(history, "/history");
        for (const auto& r : history) {
            CycleRecord rec;
            const long long id = jsonu::require_int(r, "action_id", "/history");
            if (id < 0) throw ParseError("negative action_id", 0, "/history");
            rec.action_id = static_cast<std::size_t>(id);
            rec.name = jsonu::require_string(r, "name", "/history");
            rec.ref = jsonu::require_string(r, "ref", "/history");
            rec.result = jsonu::require_string(r, "result", "/history");
            m.history.push_back(std::move(rec));
        }

        const Json& snap = jsonu::require(doc, "snapshot", "/");
        m.snapshot.url = jsonu::require_string(snap, "url", "/snapshot");
        m.snapshot.title = jsonu::require_string(snap, "title", "/snapshot");
        m.snapshot.dom_text = jsonu::require_string(snap, "dom_text", "/snapshot");
        m.snapshot.image_ref = jsonu::require_string(snap, "image_ref", "/snapshot");

        const Json& actions = jsonu::require(doc, "action_memory", "/");
        jsonu::require_array(actions, "/action_memory");
        for (const auto& a : actions) {
            ActionEntry e;
            e.signature = jsonu::require_string(a, "signature", "/action_memory");
            e.relevance = relevance_from_name(jsonu::require_string(a, "relevance", "/action_memory"));
            e.success = jsonu::require_bool(a, "success", "/action_memory");
            e.note = jsonu::require_string(a, "note", "/action_memory");
            if (m.find(e.signature)) throw ParseError("duplicate signature " + e.signature, 0, "/action_memory");
            m.action_memory.push_back(std::move(e));
        }
        for (std::size_t i = 1; i < m.history.size(); ++i) {
            if (m.history[i].action_id != m.history[i - 1].action_id + 1) {
                throw ParseError("history action ids are not consecutive", 0, "/history");
            }
        }
        return m;
    } catch (const ParseError& e) {
        throw CacheCorrupt(std::string("malformed page memory: ") + e.what() + " at " + e.where());
    }
}

// ── store ────────────────────────────────────────────────────────────────────

MemoryStore::MemoryStore(std::filesystem::path cache_dir) : cache_dir_(std::move(cache_dir)) {}

const PageMemory& MemoryStore::record_cycle(const CycleInput& in, double epsilon) {
    auto it = records_.find(in.page.url);
    if (it == records_.end()) {
        PageMemory fresh;
        if (auto cached = load_for_url(in.page.url)) fresh = std::move(*cached);
        fresh.url = in.page.url;
        it = records_.emplace(in.page.url, std::move(fresh)).first;
    }
    PageMemory& m = it->second;

    m.objective = in.objective;

    const std::size_t next_id = m.history.empty() ? 1 : m.history.back().action_id + 1;
    const auto ref = in.action.element();
    m.history.push_back(CycleRecord{next_id, std::string(in.action.name()), ref ? std::string(*ref) : std::string(),
                                    describe_effect(in)});

    if (!in.eval.rationale.empty()) {
        if (!m.progress_summary.empty()) m.progress_summary += '\n';
        m.progress_summary += in.eval.rationale;
        if (m.progress_summary.size() > kProgressSummaryLimit) {
            m.progress_summary.erase(0, m.progress_summary.size() - kProgressSummaryLimit);
        }
    }

    m.snapshot = PageSnapshot{in.page.url, in.page.title, compress_dom_text(in.page.dom_text),
                              "snapshot://" + in.page.state_digest};

    const std::string signature = action_signature(in.action);
    ActionEntry entry{signature, classify(in.eval, epsilon), in.effective, in.reason};
    auto existing = std::find_if(m.action_memory.begin(), m.action_memory.end(),
                                 [&](const ActionEntry& e) { return e.signature == signature; });
    if (existing != m.action_memory.end()) {
        *existing = std::move(entry);
    } else {
        m.action_memory.push_back(std::move(entry));
    }

    write_through(m);
    return m;
}

void MemoryStore::reclassify(std::string_view url, std::string_view signature, Relevance relevance) {
    auto it = records_.find(url);
    if (it == records_.end()) return;
    for (auto& e : it->second.action_memory) {
        if (e.signature != signature || e.relevance == relevance) continue;
        e.relevance = relevance;
        write_through(it->second);
    }
}

std::optional<PageMemory> MemoryStore::load_for_url(std::string_view url) {
    if (auto it = records_.find(url); it != records_.end()) return it->second;
    if (!cache_dir_) return std::nullopt;
    const auto file = *cache_dir_ / memory_filename(url);
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return std::nullopt;
    try {
        PageMemory m = parse_page_memory(jsonu::read_file(file));
        if (m.url != url) throw CacheCorrupt("cache file " + file.string() + " holds url " + m.url);
        records_.emplace(m.url, m);
        return m;
    } catch (const Error& e) {
        warnings_.push_back(std::string("ignoring cache entry for ") + std::string(url) + ": " + e.what());
        return std::nullopt;
    }
}

const PageMemory* MemoryStore::find(std::string_view url) const {
    auto it = records_.find(url);
    return it == records_.end() ? nullptr : &it->second;
}

std::vector<PageSummary> MemoryStore::summaries_for_decomposition() const {
    std::vector<PageSummary> out;
    for (const auto& [url, m] : records_) {
        PageSummary s{url, m.snapshot.title, m.progress_summary, {}};
        for (const auto& r : m.history) {
            std::string label = r.ref.empty() ? r.name : r.name + " " + r.ref;
            if (std::find(s.visited_actions.begin(), s.visited_actions.end(), label) == s.visited_actions.end()) {
                s.visited_actions.push_back(std::move(label));
            }
            if (s.visited_actions.size() == kSummaryActionLimit) break;
        }
        out.push_back(std::move(s));
    }
    return out;
}

void MemoryStore::insert(PageMemory memory) {
    std::string key = memory.url;
    records_.insert_or_assign(std::move(key), std::move(memory));
}

void MemoryStore::write_through(const PageMemory& memory) {
    if (!cache_dir_) return;
    std::error_code ec;
    std::filesystem::create_directories(*cache_dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + cache_dir_->string() + ": " + ec.message());
    jsonu::write_file(*cache_dir_ / memory_filename(memory.url), render_page_memory(memory).dump(2) + "\n");
}

void persist(const MemoryStore& store, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create cache directory " + dir.string() + ": " + ec.message());
    for (const auto& [url, m] : store.records()) {
        jsonu::write_file(dir / memory_filename(url), render_page_memory(m).dump(2) + "\n");
    }
}

MemoryStore restore(const std::filesystem::path& dir) {
    MemoryStore store;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("cache directory " + dir.string() + " does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mem") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        try {
            PageMemory m = parse_page_memory(jsonu::read_file(file));
            if (file.filename() != memory_filename(m.url)) {
                throw CacheCorrupt("file name does not match url " + m.url);
            }
            store.insert(std::move(m));
        } catch (const Error& e) {
            store.add_warning("skipping " + file.filename().string() + ": " + e.what());
        }
    }
    return store;
}

} // namespace bnb
