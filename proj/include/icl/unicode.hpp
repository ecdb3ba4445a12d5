#pragma once

#include <string>
#include <string_view>
#include <vector>

// Thin wrappers over ICU for the handful of Unicode queries the tokenizer needs.
namespace icl {

bool is_valid_utf8(std::string_view text);

/// Full Unicode lowercase mapping (root locale). Input must be valid UTF-8.
std::string to_lower_utf8(std::string_view text);

/// Decodes into code points; ill-formed sequences become U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view text);

void append_utf8(std::string& out, char32_t cp);

bool is_unicode_whitespace(char32_t cp);

/// Unicode general category P*, plus the ASCII symbols that C's ispunct() accepts.
bool is_punctuation(char32_t cp);

}  // namespace icl
