#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace phonfeat {

std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);

// Shortest round-trip decimal form of a double (std::to_chars). Used for all
// CSV/JSON-adjacent numeric output so identical inputs give identical bytes.
std::string format_double(double v);

}  // namespace phonfeat
