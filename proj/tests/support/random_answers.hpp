#pragma once

// Random ASCII answer strings that exercise normalization edge cases.

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "rcrc/random.hpp"

namespace rcrc::testing {

inline std::optional<std::string> random_answer(Rng& rng) {
    static constexpr std::array<std::string_view, 26> kPieces = {
        "the", "The", "a", "A", "an", "AN", "fast", "Fast", "screen", "great", "ssd",
        "storage", "amazingly", "the.", "a-b", "x_y", "it's", "!", ",", "(", "\"quoted\"",
        "theory", "and", "42", "an-", "NO"};
    const std::uint64_t kind = rng.uniform_int(0, 19);
    if (kind == 0) return std::nullopt;
    if (kind == 1) return std::string("NO ANSWER");
    if (kind == 2) return std::string(rng.uniform_int(0, 2), ' ');
    std::string s;
    const std::uint64_t n = rng.uniform_int(1, 6);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0 || rng.uniform_int(0, 4) == 0) s.append(rng.uniform_int(1, 2), ' ');
        s += kPieces[rng.uniform_int(0, kPieces.size() - 1)];
    }
    return s;
}

// Pred drawn near the gold half the time so that matches actually occur.
inline std::optional<std::string> related_answer(Rng& rng, const std::optional<std::string>& gold) {
    if (!gold || rng.uniform_int(0, 1) == 0) return random_answer(rng);
    std::string s = *gold;
    switch (rng.uniform_int(0, 3)) {
        case 0: return "The " + s;
        case 1: return s + " !";
        case 2:
            for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            return s;
        default: return s + " fast";
    }
}

}  // namespace rcrc::testing
