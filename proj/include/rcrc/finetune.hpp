#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcrc/corpus.hpp"
#include "rcrc/pretune.hpp"
#include "rcrc/tokenizer.hpp"

namespace rcrc {

inline constexpr std::string_view kNoAnswerText = "NO ANSWER";

// Most recent turns kept as context. Laptop uses 6, restaurant 5.
struct ContextWindow {
    std::size_t max_turns = 6;
};

struct RCRCExample {
    std::vector<std::string> tokens;
    std::size_t left_len = 0;
    TokenSpan span;  // (0, 0) for NO ANSWER
    bool is_no_answer = false;

    std::string dialogue_id;
    int turn_id = 0;
    std::string review_id;
    std::size_t context_turns = 0;
    // First review token kept on the right side (non-zero when the review
    // window was shifted to keep the gold span).
    std::size_t review_offset = 0;
    bool review_truncated = false;

    std::vector<MaskRecord> mask_records;

    bool has_answer() const { return !is_no_answer; }
};

struct FormatBudget {
    std::size_t max_len = 256;
    std::size_t max_left = 96;
};

// Answer texts to use for prior turns instead of the gold ones, keyed by
// (dialogue_id, turn_id).
using ContextOverrides = std::map<std::pair<std::string, int>, std::string>;

// Last min(|prior|, max_turns) (question, answer) pairs in order. NO ANSWER
// turns contribute the literal "NO ANSWER".
std::vector<std::pair<std::string, std::string>> window_context(
    std::span<const Turn> prior, ContextWindow window);

// Throws AlignmentError when the gold span cannot be placed on tokens or does
// not fit the right-side budget, std::out_of_range for an unknown turn.
RCRCExample build_rcrc_input(const Dialogue& dialogue, int turn_id,
                             ContextWindow window, FormatBudget budget,
                             const Tokenizer& tokenizer = {},
                             const ContextOverrides* overrides = nullptr);

struct FormatIssue {
    std::string dialogue_id;
    int turn_id = 0;
    std::string message;
};

struct FormatReport {
    std::size_t turns = 0;
    std::size_t emitted = 0;
    std::size_t no_answer = 0;
    std::size_t review_truncated = 0;
    std::vector<FormatIssue> issues;
};

struct FormatOutcome {
    std::optional<RCRCExample> example;
    std::string error;
    std::string dialogue_id;
    int turn_id = 0;
};

// Every turn of every dialogue in (dialogue order, turn order).
std::vector<FormatOutcome> format_dialogues_serial(
    const std::vector<Dialogue>& dialogues, ContextWindow window,
    FormatBudget budget, const Tokenizer& tokenizer,
    const ContextOverrides* overrides = nullptr);

// OpenMP over dialogues; same output as the serial kernel.
std::vector<FormatOutcome> format_dialogues(
    const std::vector<Dialogue>& dialogues, ContextWindow window,
    FormatBudget budget, const Tokenizer& tokenizer,
    const ContextOverrides* overrides = nullptr);

FormatReport summarize(const std::vector<FormatOutcome>& outcomes);

}  // namespace rcrc
