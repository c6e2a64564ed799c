#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcrc/pretune.hpp"
#include "rcrc/random.hpp"

namespace rcrc {

struct MaskPolicy {
    double mask_rate = 0.15;
    double replace_with_mask = 0.8;
    double replace_with_random = 0.1;
    double keep_original = 0.1;
    // Keep answer-span tokens out of the candidate set.
    bool protect_span = false;

    // Throws UsageError unless the rates are probabilities and the three
    // sub-policies sum to 1.
    void validate() const;
};

struct MaskedExample {
    std::vector<std::string> tokens;
    std::vector<MaskRecord> records;
};

std::string_view to_string(MaskAction action);
MaskAction parse_mask_action(std::string_view text);

// Selects each non-special token with probability mask_rate and rewrites it
// per the sub-policy. `answer` is the span to protect when protect_span is
// set. `replacement_vocab` feeds the random action and must not contain
// special tokens; an empty vocabulary turns random replacements into keeps.
MaskedExample apply_masking(std::span<const std::string> tokens,
                            std::optional<TokenSpan> answer,
                            const MaskPolicy& policy,
                            std::span<const std::string> replacement_vocab,
                            Rng& rng);

// Undo the records in reverse order.
std::vector<std::string> unmask(std::vector<std::string> tokens,
                                std::span<const MaskRecord> records);

// Sorted distinct non-special tokens, usable as a replacement vocabulary.
std::vector<std::string> replacement_vocabulary(
    std::span<const std::string> tokens);

struct MaskJob {
    std::vector<std::string> tokens;
    std::optional<TokenSpan> answer;
    std::uint64_t seed = 0;
};

std::vector<MaskedExample> mask_batch_serial(
    std::span<const MaskJob> jobs, const MaskPolicy& policy,
    std::span<const std::string> replacement_vocab);

std::vector<MaskedExample> mask_batch(
    std::span<const MaskJob> jobs, const MaskPolicy& policy,
    std::span<const std::string> replacement_vocab);

}  // namespace rcrc
