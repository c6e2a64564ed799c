#include "rcrc/finetune.hpp"

#include <algorithm>
#include <stdexcept>

#include "rcrc/error.hpp"
#include "rcrc/utf8.hpp"

namespace rcrc {

namespace {

using TokenPair = std::pair<std::vector<std::string>, std::vector<std::string>>;

std::size_t window_start(std::size_t prior, ContextWindow window) {
    return prior > window.max_turns ? prior - window.max_turns : 0;
}

std::string context_answer(const Dialogue& d, const Turn& t, const ContextOverrides* overrides) {
    if (overrides) {
        auto it = overrides->find({d.dialogue_id, t.turn_id});
        if (it != overrides->end()) return it->second;
    }
    return t.is_no_answer() ? std::string(kNoAnswerText) : t.gold_answer_text;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> window_context(std::span<const Turn> prior,
                                                                ContextWindow window) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = window_start(prior.size(), window); i < prior.size(); ++i) {
        const Turn& t = prior[i];
        out.emplace_back(t.question,
                         t.is_no_answer() ? std::string(kNoAnswerText) : t.gold_answer_text);
    }
    return out;
}

RCRCExample build_rcrc_input(const Dialogue& dialogue, int turn_id, ContextWindow window,
                             FormatBudget budget, const Tokenizer& tokenizer,
                             const ContextOverrides* overrides) {
    auto it = std::find_if(dialogue.turns.begin(), dialogue.turns.end(),
                           [&](const Turn& t) { return t.turn_id == turn_id; });
    if (it == dialogue.turns.end()) {
        throw std::out_of_range("dialogue " + dialogue.dialogue_id + " has no turn " +
                                std::to_string(turn_id));
    }
    const Turn& turn = *it;
    if (utf8::trim(turn.question).empty()) throw DataError("empty question");
    const auto prior = static_cast<std::size_t>(it - dialogue.turns.begin());

    std::vector<TokenPair> context;
    for (std::size_t i = window_start(prior, window); i < prior; ++i) {
        const Turn& t = dialogue.turns[i];
        context.emplace_back(tokenizer.tokenize(t.question).tokens(),
                             tokenizer.tokenize(context_answer(dialogue, t, overrides)).tokens());
    }

    RCRCExample ex;
    ex.dialogue_id = dialogue.dialogue_id;
    ex.turn_id = turn.turn_id;
    ex.review_id = dialogue.review_id;
    ex.is_no_answer = turn.is_no_answer();

    ex.tokens = assemble_left_tokens(context, tokenizer.tokenize(turn.question).tokens(),
                                     budget.max_left, &ex.context_turns);
    ex.left_len = ex.tokens.size();

    const TokenSeq review = tokenizer.tokenize(dialogue.review_text);
    std::optional<TokenSpan> gold;
    if (turn.gold_span) gold = char_span_to_token_span(review, *turn.gold_span);

    const std::size_t right_budget = budget.max_len - ex.left_len - 1;
    const std::size_t n = review.size();
    std::size_t start = 0;
    if (n > right_budget) {
        ex.review_truncated = true;
        if (gold && gold->v >= right_budget) {
            const std::size_t span_len = gold->v - gold->u + 1;
            if (span_len > right_budget) {
                throw AlignmentError("gold span of " + std::to_string(span_len) +
                                     " tokens exceeds the right-side budget of " +
                                     std::to_string(right_budget));
            }
            // Single window centred on the gold span.
            const std::size_t centre = (gold->u + gold->v) / 2;
            start = centre > right_budget / 2 ? centre - right_budget / 2 : 0;
            start = std::min(start, n - right_budget);
            start = std::min(start, gold->u);
            if (gold->v >= start + right_budget) start = gold->v + 1 - right_budget;
        }
    }
    const std::size_t stop = std::min(n, start + right_budget);
    ex.review_offset = start;
    ex.tokens.insert(ex.tokens.end(), review.tokens().begin() + static_cast<std::ptrdiff_t>(start),
                     review.tokens().begin() + static_cast<std::ptrdiff_t>(stop));
    ex.tokens.emplace_back(surface(SpecialToken::sep));

    if (gold) {
        ex.span.u = ex.left_len + gold->u - start;
        ex.span.v = ex.left_len + gold->v - start;
    }
    return ex;
}

namespace {

struct TurnTask {
    std::size_t dialogue = 0;
    std::size_t turn = 0;
};

FormatOutcome format_one(const std::vector<Dialogue>& dialogues, TurnTask task,
                         ContextWindow window, FormatBudget budget, const Tokenizer& tokenizer,
                         const ContextOverrides* overrides) {
    const Dialogue& d = dialogues[task.dialogue];
    FormatOutcome out;
    out.dialogue_id = d.dialogue_id;
    out.turn_id = d.turns[task.turn].turn_id;
    try {
        out.example = build_rcrc_input(d, out.turn_id, window, budget, tokenizer, overrides);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<TurnTask> turn_tasks(const std::vector<Dialogue>& dialogues) {
    std::vector<TurnTask> tasks;
    for (std::size_t d = 0; d < dialogues.size(); ++d) {
        for (std::size_t t = 0; t < dialogues[d].turns.size(); ++t) tasks.push_back({d, t});
    }
    return tasks;
}

}  // namespace

std::vector<FormatOutcome> format_dialogues_serial(const std::vector<Dialogue>& dialogues,
                                                   ContextWindow window, FormatBudget budget,
                                                   const Tokenizer& tokenizer,
                                                   const ContextOverrides* overrides) {
    std::vector<FormatOutcome> out;
    for (const TurnTask& t : turn_tasks(dialogues)) {
        out.push_back(format_one(dialogues, t, window, budget, tokenizer, overrides));
    }
    return out;
}

std::vector<FormatOutcome> format_dialogues(const std::vector<Dialogue>& dialogues,
                                            ContextWindow window, FormatBudget budget,
                                            const Tokenizer& tokenizer,
                                            const ContextOverrides* overrides) {
    const std::vector<TurnTask> tasks = turn_tasks(dialogues);
    std::vector<FormatOutcome> out(tasks.size());
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = format_one(dialogues, tasks[k], window, budget, tokenizer, overrides);
    }
    return out;
}

FormatReport summarize(const std::vector<FormatOutcome>& outcomes) {
    FormatReport r;
    for (const auto& o : outcomes) {
        ++r.turns;
        if (!o.example) {
            r.issues.push_back({o.dialogue_id, o.turn_id, o.error});
            continue;
        }
        ++r.emitted;
        if (o.example->is_no_answer) ++r.no_answer;
        if (o.example->review_truncated) ++r.review_truncated;
    }
    return r;
}

}  // namespace rcrc
