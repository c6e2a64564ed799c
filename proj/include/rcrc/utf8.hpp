#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rcrc::utf8 {

// A decoded UTF-8 string: one entry per Unicode scalar value plus the byte
// offset where it starts. `byte_offsets` has size() + 1 entries so that any
// code-point range [a, b) maps to bytes [byte_offsets[a], byte_offsets[b]).
// Invalid bytes decode to U+FFFD, one per byte.
struct Decoded {
    std::vector<char32_t> code_points;
    std::vector<std::size_t> byte_offsets;

    std::size_t size() const { return code_points.size(); }
};

Decoded decode(std::string_view text);

std::size_t length(std::string_view text);

void append(std::string& out, char32_t cp);

// Substring by code-point indices [begin, end).
std::string substr(std::string_view text, std::size_t begin, std::size_t end);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);

std::string to_lower(std::string_view text);

// Trims Unicode whitespace at both ends.
std::string_view trim(std::string_view text);

// Collapses every whitespace run to one ASCII space and trims the ends.
std::string collapse_whitespace(std::string_view text);

}  // namespace rcrc::utf8
