#pragma once

// Minimal UTF-8 decoding and character classification for the scripts we
// expect in timeline text. Not a full Unicode database.

#include <cstdint>
#include <string>
#include <string_view>

namespace farmlens::utf8 {

// Decodes the code point starting at s[i] and advances i. Invalid sequences
// decode to U+FFFD and consume one byte.
char32_t next(std::string_view s, std::size_t& i);
void append(std::string& out, char32_t cp);

bool is_letter(char32_t c);
bool is_upper(char32_t c);
bool is_space(char32_t c);
bool is_digit(char32_t c);
bool is_punct(char32_t c);
char32_t to_lower(char32_t c);

} // namespace farmlens::utf8
