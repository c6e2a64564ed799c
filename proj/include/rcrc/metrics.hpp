#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcrc/corpus.hpp"

namespace rcrc {

struct Prediction {
    std::string dialogue_id;
    int turn_id = 0;
    std::string answer_text;
};

// Empty (after trimming) or the literal "NO ANSWER".
bool is_no_answer_prediction(std::string_view text);

// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
// whitespace; in that order.
std::string normalize_answer(std::string_view text);

// Answers are passed as optional text: nullopt is NO ANSWER.
using Answer = std::optional<std::string_view>;

int exact_match(Answer pred, Answer gold);
double token_f1(Answer pred, Answer gold);

struct TurnScore {
    std::string dialogue_id;
    int turn_id = 0;
    bool gold_no_answer = false;
    bool pred_missing = false;
    bool pred_no_answer = false;
    int em = 0;
    double f1 = 0.0;
};

struct EvalReport {
    double em = 0.0;
    double f1 = 0.0;
    std::size_t turns = 0;
    std::size_t missing_predictions = 0;
    std::size_t unmatched_predictions = 0;
    std::size_t gold_no_answer = 0;
    std::size_t pred_no_answer = 0;
    std::vector<TurnScore> rows;
};

// JSONL {dialogue_id, turn_id, answer_text}; a null answer_text is NO
// ANSWER. Throws DataError on malformed lines.
std::vector<Prediction> read_predictions(std::istream& in);

// Per-turn scores in gold order. Missing predictions score 0. Throws
// DataError on duplicate (dialogue_id, turn_id) predictions.
std::vector<TurnScore> score_turns_serial(
    std::span<const Dialogue> golds, std::span<const Prediction> preds);
std::vector<TurnScore> score_turns(std::span<const Dialogue> golds,
                                   std::span<const Prediction> preds);

// Macro average over all turns of all dialogues.
EvalReport evaluate(std::span<const Dialogue> golds,
                    std::span<const Prediction> preds);

void write_report_json(std::ostream& out, const EvalReport& report,
                       bool include_rows = true);

// Domains side by side, EM and F1 as percentages with two decimals.
void write_domain_table(
    std::ostream& out,
    std::span<const std::pair<std::string, EvalReport>> domains);

}  // namespace rcrc
