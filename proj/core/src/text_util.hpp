#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cdes::detail {

enum class ParseResult { kOk, kMalformed, kNonFinite };

// Parses a complete token as a float. Overflow counts as non-finite.
ParseResult parse_float(std::string_view token, float& out);

void split_whitespace(std::string_view line, std::vector<std::string_view>& out);
void split_char(std::string_view line, char sep, std::vector<std::string_view>& out);

std::string ascii_lower(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace cdes::detail
