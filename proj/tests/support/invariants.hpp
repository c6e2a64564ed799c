#pragma once

// Structural checks on generated examples, shared by the unit and acceptance
// suites. Each returns an empty string when the example is well formed.

#include <algorithm>
#include <string>
#include <vector>

#include "rcrc/pretune.hpp"
#include "rcrc/tokenizer.hpp"

namespace rcrc::testing {

inline std::size_t count_of(const std::vector<std::string>& tokens, std::size_t from,
                            std::size_t to, SpecialToken t) {
    return static_cast<std::size_t>(std::count(tokens.begin() + static_cast<std::ptrdiff_t>(from),
                                               tokens.begin() + static_cast<std::ptrdiff_t>(to),
                                               std::string(surface(t))));
}

// Layout checks common to pre-tuning and fine-tuning examples.
inline std::string check_layout(const std::vector<std::string>& tokens, std::size_t left_len,
                                TokenSpan span, bool no_answer, std::size_t max_len,
                                std::size_t max_left) {
    const std::size_t n = tokens.size();
    if (n > max_len) return "length " + std::to_string(n) + " > max_len";
    if (left_len > max_left) return "left_len " + std::to_string(left_len) + " > max_left";
    if (n < 3 || left_len < 3 || left_len >= n) return "degenerate layout";
    if (tokens[0] != surface(SpecialToken::cls)) return "tokens[0] is not [CLS]";
    if (tokens[left_len - 1] != surface(SpecialToken::sep)) return "no [SEP] at left_len - 1";
    if (tokens[n - 1] != surface(SpecialToken::sep)) return "no trailing [SEP]";
    if (count_of(tokens, 0, n, SpecialToken::sep) != 2) return "expected exactly two [SEP]";
    if (count_of(tokens, 0, n, SpecialToken::cls) != 1) return "expected one [CLS]";
    if (count_of(tokens, left_len, n, SpecialToken::q) + count_of(tokens, left_len, n, SpecialToken::a) != 0) {
        return "[Q]/[A] on the right side";
    }
    if (no_answer) {
        if (span.u != 0 || span.v != 0) return "no-answer span is not (0,0)";
    } else {
        if (!(left_len <= span.u && span.u <= span.v && span.v < n - 1)) return "span out of bounds";
    }
    return {};
}

inline std::string check_pretune(const PretuneExample& ex, const GenConfig& cfg,
                                 const std::vector<std::string>& inserted_answer) {
    if (auto e = check_layout(ex.tokens, ex.left_len, ex.span, ex.is_negative, cfg.max_len, cfg.max_left);
        !e.empty()) {
        return e;
    }
    if (count_of(ex.tokens, 0, ex.left_len, SpecialToken::q) != ex.h_used + 1) return "[Q] count != h_used + 1";
    if (count_of(ex.tokens, 0, ex.left_len, SpecialToken::a) != ex.h_used) return "[A] count != h_used";
    const std::vector<std::string> right(ex.tokens.begin() + static_cast<std::ptrdiff_t>(ex.left_len),
                                         ex.tokens.end() - 1);
    if (ex.is_negative) {
        if (!find_subsequence(right, inserted_answer)) return "distractor missing from right side";
    } else {
        const std::vector<std::string> got(ex.tokens.begin() + static_cast<std::ptrdiff_t>(ex.span.u),
                                           ex.tokens.begin() + static_cast<std::ptrdiff_t>(ex.span.v) + 1);
        if (got != inserted_answer) return "tokens[u..v] != tokenized answer";
    }
    return {};
}

}  // namespace rcrc::testing
