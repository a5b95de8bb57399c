#pragma once

#include "bnb/action.hpp"
#include "bnb/error.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// Small schema helpers shared by the document readers. Every failure is a
// ParseError naming the JSON pointer of the offending field.
namespace bnb::jsonu {

const Json& require(const Json& obj, const char* key, const std::string& where);
const Json* optional(const Json& obj, const char* key);

std::string require_string(const Json& obj, const char* key, const std::string& where);
std::optional<std::string> optional_string(const Json& obj, const char* key, const std::string& where);
bool require_bool(const Json& obj, const char* key, const std::string& where);
double require_number(const Json& obj, const char* key, const std::string& where);
long long require_int(const Json& obj, const char* key, const std::string& where);
std::vector<std::string> string_list(const Json& value, const std::string& where);

void require_object(const Json& value, const std::string& where);
void require_array(const Json& value, const std::string& where);

// Parses a whole file; syntax errors carry the byte offset and the path.
Json read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, const std::string& text);

} // namespace bnb::jsonu
