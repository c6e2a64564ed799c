#include "rcrc/utf8.hpp"

namespace rcrc::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one scalar value starting at text[i]; returns its byte length.
std::size_t decode_one(std::string_view text, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    }
    std::size_t len = 0;
    char32_t value = 0;
    char32_t min_value = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        value = b0 & 0x1F;
        min_value = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        value = b0 & 0x0F;
        min_value = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        value = b0 & 0x07;
        min_value = 0x10000;
    } else {
        cp = kReplacement;
        return 1;
    }
    if (i + len > text.size()) {
        cp = kReplacement;
        return 1;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(text[i + k]);
        if ((b & 0xC0) != 0x80) {
            cp = kReplacement;
            return 1;
        }
        value = (value << 6) | (b & 0x3F);
    }
    if (value < min_value || value > 0x10FFFF ||
        (value >= 0xD800 && value <= 0xDFFF)) {
        cp = kReplacement;
        return 1;
    }
    cp = value;
    return len;
}

}  // namespace

Decoded decode(std::string_view text) {
    Decoded out;
    out.code_points.reserve(text.size());
    out.byte_offsets.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        const std::size_t n = decode_one(text, i, cp);
        out.code_points.push_back(cp);
        out.byte_offsets.push_back(i);
        i += n;
    }
    out.byte_offsets.push_back(text.size());
    return out;
}

std::size_t length(std::string_view text) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        i += decode_one(text, i, cp);
        ++n;
    }
    return n;
}

void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string substr(std::string_view text, std::size_t begin, std::size_t end) {
    std::size_t i = 0;
    std::size_t index = 0;
    std::size_t byte_begin = text.size();
    std::size_t byte_end = text.size();
    while (i < text.size()) {
        if (index == begin) byte_begin = i;
        if (index == end) {
            byte_end = i;
            break;
        }
        char32_t cp = 0;
        i += decode_one(text, i, cp);
        ++index;
    }
    if (begin >= end || byte_begin >= byte_end) return {};
    return std::string(text.substr(byte_begin, byte_end - byte_begin));
}

bool is_space(char32_t cp) {
    switch (cp) {
        case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200B;
    }
}

bool is_punct(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB:
        case 0xBF:
            return true;
        default:
            break;
    }
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
           (cp >= 0xFF01 && cp <= 0xFF0F);
}

bool is_upper(char32_t cp) {
    return (cp >= 'A' && cp <= 'Z') ||
           (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7);
}

char32_t to_lower(char32_t cp) {
    return is_upper(cp) ? cp + 0x20 : cp;
}

std::string to_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : decode(text).code_points) append(out, to_lower(cp));
    return out;
}

std::string_view trim(std::string_view text) {
    const Decoded d = decode(text);
    std::size_t b = 0;
    std::size_t e = d.size();
    while (b < e && is_space(d.code_points[b])) ++b;
    while (e > b && is_space(d.code_points[e - 1])) --e;
    return text.substr(d.byte_offsets[b], d.byte_offsets[e] - d.byte_offsets[b]);
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char32_t cp : decode(text).code_points) {
        if (is_space(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        append(out, cp);
    }
    return out;
}

}  // namespace rcrc::utf8
