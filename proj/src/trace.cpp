#include "bnb/trace.hpp"

#include "bnb/error.hpp"

namespace bnb {

TraceSink::TraceSink(const std::filesystem::path& file) : file_(file, std::ios::binary | std::ios::trunc) {
    if (!file_) throw IoError("cannot open trace file " + file.string());
    out_ = &file_;
}

void TraceSink::emit(const std::string& event, Json fields) {
    std::lock_guard lock(mu_);
    const std::size_t seq = seq_++;
    if (!out_) return;
    Json line = Json::object();
    line["seq"] = seq;
    line["event"] = event;
    for (auto& [k, v] : fields.items()) line[k] = std::move(v);
    *out_ << line.dump() << '\n';
}

} // namespace bnb
