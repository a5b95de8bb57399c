#include "bnb/json_util.hpp"

#include <fstream>
#include <sstream>

namespace bnb::jsonu {

namespace {
std::string child(const std::string& where, const char* key) {
    return (where == "/" ? std::string() : where) + "/" + key;
}
} // namespace

const Json& require(const Json& obj, const char* key, const std::string& where) {
    require_object(obj, where);
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(std::string("missing required field '") + key + "'", 0, child(where, key));
    return *it;
}

const Json* optional(const Json& obj, const char* key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string require_string(const Json& obj, const char* key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string", 0, child(where, key));
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& obj, const char* key, const std::string& where) {
    const Json* v = optional(obj, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ParseError(std::string("field '") + key + "' must be a string", 0, child(where, key));
    return v->get<std::string>();
}

bool require_bool(const Json& obj, const char* key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_boolean()) throw ParseError(std::string("field '") + key + "' must be a boolean", 0, child(where, key));
    return v.get<bool>();
}

double require_number(const Json& obj, const char* key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' must be a number", 0, child(where, key));
    return v.get<double>();
}

long long require_int(const Json& obj, const char* key, const std::string& where) {
    const Json& v = require(obj, key, where);
    if (!v.is_number_integer()) {
        throw ParseError(std::string("field '") + key + "' must be an integer", 0, child(where, key));
    }
    return v.get<long long>();
}

std::vector<std::string> string_list(const Json& value, const std::string& where) {
    require_array(value, where);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string()) throw ParseError("expected a string", 0, where + "/" + std::to_string(i));
        out.push_back(value[i].get<std::string>());
    }
    return out;
}

void require_object(const Json& value, const std::string& where) {
    if (!value.is_object()) throw ParseError("expected an object", 0, where);
}

void require_array(const Json& value, const std::string& where) {
    if (!value.is_array()) throw ParseError("expected an array", 0, where);
}

Json read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ParseError(file.string() + ": " + e.what(), e.byte, file.string());
    }
}

void write_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + file.string());
    out << text;
    if (!out) throw IoError("write failed for " + file.string());
}

} // namespace bnb::jsonu
