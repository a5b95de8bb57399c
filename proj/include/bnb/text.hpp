#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bnb {

// Lowercase ASCII, split on every non-alphanumeric byte, no stopwords.
std::vector<std::string> tokenize(std::string_view text);
std::set<std::string> token_set(std::string_view text);

// |a ∩ b|
std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b);

bool contains_ci(std::string_view haystack, std::string_view needle);

} // namespace bnb
