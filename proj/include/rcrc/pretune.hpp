#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcrc/corpus.hpp"
#include "rcrc/random.hpp"
#include "rcrc/tokenizer.hpp"

namespace rcrc {

struct GenConfig {
    std::size_t h_max = 9;
    std::size_t k_repeats = 1;
    double neg_prob = 0.5;
    std::size_t max_len = 256;
    std::size_t max_left = 96;
    std::uint64_t seed = 0;

    // Throws UsageError when the invariants do not hold.
    void validate() const;
};

enum class MaskAction { mask, random, keep };

struct MaskRecord {
    std::size_t position = 0;
    std::string original;
    MaskAction action = MaskAction::mask;

    friend bool operator==(const MaskRecord&, const MaskRecord&) = default;
};

struct PretuneExample {
    std::vector<std::string> tokens;
    std::size_t left_len = 0;
    // (0, 0) points at [CLS] and means NO ANSWER.
    TokenSpan span;
    bool is_negative = false;

    std::string pair_id;
    std::string review_id;
    // Pair whose answer was inserted as the distractor (negatives only).
    std::string distractor_pair_id;
    std::size_t repeat = 0;
    std::size_t h_drawn = 0;
    std::size_t h_used = 0;
    std::size_t slot = 0;
    // Oldest context turns were dropped to fit max_left.
    bool context_truncated = false;
    // A negative was drawn but the entity had no other pair to borrow from.
    bool negative_fallback = false;
    // Negative whose right side still contains the tokenized true answer.
    bool answer_leak = false;

    std::vector<MaskRecord> mask_records;

    bool has_answer() const { return !is_negative; }
};

enum class SkipReason { answer_too_long, no_reviews };

std::string_view to_string(SkipReason reason);

struct GenOutcome {
    std::optional<PretuneExample> example;
    SkipReason skip_reason = SkipReason::answer_too_long;
};

// "[CLS] [Q] q1 [A] a1 ... [Q] current [SEP]". Throws DataError when the
// current question is empty.
TokenSeq assemble_left_side(const std::vector<QAPair>& context,
                            std::string_view current_question,
                            const Tokenizer& tokenizer = {});

// Same, over pre-tokenized (question, answer) pairs. When `max_left` is set,
// the oldest whole turns are dropped until the sequence fits and the current
// question's tail is truncated as a last resort. `kept` receives the number of
// context turns that survived.
std::vector<std::string> assemble_left_tokens(
    std::span<const std::pair<std::vector<std::string>,
                              std::vector<std::string>>> context,
    const std::vector<std::string>& current_question,
    std::optional<std::size_t> max_left = std::nullopt,
    std::size_t* kept = nullptr);

struct ContextSample {
    std::vector<std::size_t> indices;  // into the corpus
    std::size_t h_used = 0;
};

// Draws `h` distinct pairs uniformly from `pool` without `exclude`. Clamps to
// the available count. `pool` must be ascending, as EntityCorpus::entity
// returns it.
ContextSample sample_context(std::span<const std::size_t> pool,
                             std::size_t exclude, std::size_t h, Rng& rng);

struct Insertion {
    std::vector<std::string> right_side;
    std::size_t prefix_len = 0;
};

// sentences[0..slot) ++ answer ++ sentences[slot..m). Requires slot <= m.
Insertion insert_answer(std::span<const std::vector<std::string>> sentences,
                        const std::vector<std::string>& answer,
                        std::size_t slot);

// Test hook: forces the positive/negative decision instead of drawing it.
enum class ForceLabel { none, positive, negative };

// One run of the generation loop body for `current` (an index into `qa`).
// `reviews` must be the review indices of the current pair's entity.
GenOutcome generate_example(const QACorpus& qa, std::size_t current,
                            const ReviewCorpus& reviews,
                            std::span<const std::size_t> entity_reviews,
                            const GenConfig& cfg, std::size_t repeat,
                            const Tokenizer& tokenizer,
                            ForceLabel force = ForceLabel::none);

struct GenReport {
    std::size_t attempts = 0;
    std::size_t emitted = 0;
    std::size_t skipped = 0;
    std::size_t skipped_answer_too_long = 0;
    std::size_t skipped_no_reviews = 0;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::size_t negative_fallbacks = 0;
    std::size_t answer_leaks = 0;
    std::size_t context_truncated = 0;
    std::vector<std::size_t> h_histogram;  // indexed by h_used

    void add(const GenOutcome& outcome);
    void merge(const GenReport& other);

    friend bool operator==(const GenReport&, const GenReport&) = default;
};

// Work item (repeat pass, pair index) in output order.
struct GenTask {
    std::size_t repeat = 0;
    std::size_t pair = 0;
};

// Output order: repeat-major, pairs sorted by pair_id. Throws DataError when
// the corpora share no entity.
std::vector<std::size_t> generation_order(const QACorpus& qa,
                                          const ReviewCorpus& reviews);

// Reference kernel: generates the tasks one after another.
std::vector<GenOutcome> generate_batch_serial(const QACorpus& qa,
                                              const ReviewCorpus& reviews,
                                              std::span<const GenTask> tasks,
                                              const GenConfig& cfg,
                                              const Tokenizer& tokenizer);

// OpenMP kernel; result is identical to the serial one for any thread count.
std::vector<GenOutcome> generate_batch(const QACorpus& qa,
                                       const ReviewCorpus& reviews,
                                       std::span<const GenTask> tasks,
                                       const GenConfig& cfg,
                                       const Tokenizer& tokenizer);

using ExampleSink = std::function<void(const PretuneExample&)>;

// Streams all k_repeats passes through `sink` in deterministic order, holding
// at most `batch_size` outcomes in memory.
GenReport generate_dataset(const QACorpus& qa, const ReviewCorpus& reviews,
                           const GenConfig& cfg, const Tokenizer& tokenizer,
                           const ExampleSink& sink,
                           std::size_t batch_size = 4096);

}  // namespace rcrc
