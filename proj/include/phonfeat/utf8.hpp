#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace phonfeat {

// Minimal UTF-8 handling for IPA strings. Invalid byte sequences raise Error.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

// Number of codepoints in a valid UTF-8 string.
std::size_t utf8_length(std::string_view text);

// "U+0283"-style spelling for error messages.
std::string codepoint_name(char32_t cp);

// Case folding limited to ASCII and the Latin-1/Latin-Extended-A letters that
// occur in the supported lexicon scripts. Sufficient for headword lookup.
std::string utf8_casefold(std::string_view text);

}  // namespace phonfeat
