#include "bnb/task.hpp"

#include "bnb/error.hpp"
#include "bnb/json_util.hpp"

namespace bnb {

Task parse_task(const Json& doc, const std::filesystem::path& base_dir) {
    jsonu::require_object(doc, "/");
    for (const auto& [key, _] : doc.items()) {
        if (key != "schema_version" && key != "id" && key != "intent" && key != "site" && key != "goal" &&
            key != "hints" && key != "inputs") {
            throw ParseError("unexpected field '" + key + "'", 0, "/" + key);
        }
    }
    const auto version = jsonu::require_int(doc, "schema_version", "/");
    if (version != kTaskSchemaVersion) {
        throw ParseError("unsupported schema_version " + std::to_string(version), 0, "/schema_version");
    }
    Task t;
    t.id = jsonu::require_string(doc, "id", "/");
    t.intent = jsonu::require_string(doc, "intent", "/");
    if (t.intent.empty()) throw ParseError("empty intent", 0, "/intent");
    t.site_path = base_dir / jsonu::require_string(doc, "site", "/");
    t.graph = load_site_graph(t.site_path);
    if (const Json* g = jsonu::optional(doc, "goal")) t.graph.goal = parse_goal(*g, "/goal");
    if (const Json* hints = jsonu::optional(doc, "hints")) {
        jsonu::require_array(*hints, "/hints");
        for (std::size_t i = 0; i < hints->size(); ++i) {
            t.hints.push_back(parse_hint((*hints)[i], "/hints/" + std::to_string(i)));
        }
    }
    if (const Json* inputs = jsonu::optional(doc, "inputs")) t.inputs = jsonu::string_list(*inputs, "/inputs");
    return t;
}

Task load_task(const std::filesystem::path& file) {
    const Json doc = jsonu::read_file(file);
    try {
        return parse_task(doc, file.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(file.string() + ": " + e.what() + " at " + e.where(), e.position(), file.string() + "#" + e.where());
    }
}

} // namespace bnb
