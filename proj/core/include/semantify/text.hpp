#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace semantify::text {

// Trim both ends and collapse every internal whitespace run to one space.
// Case is preserved.
std::string normalize_whitespace(std::string_view in);

// Lower-cased alphanumeric runs; a small English stopword list is dropped.
std::vector<std::string> tokenize(std::string_view in);

// Backslash escaping for tab-separated fields: `\\`, `\t`, `\n`, `\r`.
std::string escape_field(std::string_view in);
// Inverse of escape_field. Throws ParseError on a dangling or unknown escape.
std::string unescape_field(std::string_view in);

std::vector<std::string_view> split(std::string_view in, char sep);

}  // namespace semantify::text
