#include "rcrc/pretune.hpp"

#include <algorithm>
#include <numeric>

#include "rcrc/error.hpp"
#include "rcrc/utf8.hpp"

namespace rcrc {

namespace {

using TokenPair = std::pair<std::vector<std::string>, std::vector<std::string>>;

// [CLS] [Q] q [SEP]
constexpr std::size_t kBareLeftOverhead = 3;
// [Q] q [A] a
constexpr std::size_t kTurnOverhead = 2;

std::vector<std::string> tokens_of(const Tokenizer& tokenizer, std::string_view text) {
    return tokenizer.tokenize(text).tokens();
}

}  // namespace

void GenConfig::validate() const {
    if (k_repeats < 1) throw UsageError("k_repeats must be >= 1");
    if (!(neg_prob >= 0.0 && neg_prob <= 1.0)) throw UsageError("neg_prob must lie in [0, 1]");
    if (max_left >= max_len) throw UsageError("max_left must be smaller than max_len");
    if (max_left < kBareLeftOverhead + 1) {
        throw UsageError("max_left must leave room for at least one question token");
    }
}

std::string_view to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::answer_too_long: return "answer_too_long";
        case SkipReason::no_reviews: return "no_reviews";
    }
    return "unknown";
}

std::vector<std::string> assemble_left_tokens(std::span<const TokenPair> context,
                                              const std::vector<std::string>& current_question,
                                              std::optional<std::size_t> max_left,
                                              std::size_t* kept) {
    std::size_t first = 0;
    std::vector<std::string> question = current_question;
    if (max_left) {
        std::size_t total = kBareLeftOverhead + question.size();
        for (const auto& [q, a] : context) total += kTurnOverhead + q.size() + a.size();
        // Drop the oldest whole turns first.
        while (total > *max_left && first < context.size()) {
            total -= kTurnOverhead + context[first].first.size() + context[first].second.size();
            ++first;
        }
        if (total > *max_left) question.resize(*max_left - kBareLeftOverhead);
    }
    if (kept) *kept = context.size() - first;

    std::vector<std::string> out;
    out.emplace_back(surface(SpecialToken::cls));
    for (std::size_t i = first; i < context.size(); ++i) {
        out.emplace_back(surface(SpecialToken::q));
        out.insert(out.end(), context[i].first.begin(), context[i].first.end());
        out.emplace_back(surface(SpecialToken::a));
        out.insert(out.end(), context[i].second.begin(), context[i].second.end());
    }
    out.emplace_back(surface(SpecialToken::q));
    out.insert(out.end(), question.begin(), question.end());
    out.emplace_back(surface(SpecialToken::sep));
    return out;
}

TokenSeq assemble_left_side(const std::vector<QAPair>& context,
                            std::string_view current_question, const Tokenizer& tokenizer) {
    if (utf8::trim(current_question).empty()) {
        throw DataError("current question is empty");
    }
    std::vector<TokenPair> pairs;
    pairs.reserve(context.size());
    for (const auto& p : context) {
        pairs.emplace_back(tokens_of(tokenizer, p.question), tokens_of(tokenizer, p.answer));
    }
    return TokenSeq::from_tokens(
        assemble_left_tokens(pairs, tokens_of(tokenizer, current_question)));
}

ContextSample sample_context(std::span<const std::size_t> pool, std::size_t exclude,
                             std::size_t h, Rng& rng) {
    // Entity pools hold corpus indices in ascending order.
    const auto ex_it = std::lower_bound(pool.begin(), pool.end(), exclude);
    const bool has_exclude = ex_it != pool.end() && *ex_it == exclude;
    const std::size_t ex_pos = static_cast<std::size_t>(ex_it - pool.begin());
    const std::size_t available = pool.size() - (has_exclude ? 1 : 0);
    const std::size_t take = std::min(h, available);
    auto at = [&](std::size_t p) { return pool[has_exclude && p >= ex_pos ? p + 1 : p]; };

    if (available > 4 * take) {
        // Sparse draw: rejection on repeated positions.
        std::vector<std::size_t> positions;
        positions.reserve(take);
        while (positions.size() < take) {
            const std::size_t p = rng.uniform_int(0, available - 1);
            if (std::find(positions.begin(), positions.end(), p) == positions.end()) {
                positions.push_back(p);
            }
        }
        std::vector<std::size_t> picked;
        picked.reserve(take);
        for (std::size_t p : positions) picked.push_back(at(p));
        return {std::move(picked), take};
    }

    std::vector<std::size_t> candidates;
    candidates.reserve(available);
    for (std::size_t p = 0; p < available; ++p) candidates.push_back(at(p));
    // Partial Fisher-Yates: the first `take` slots end up uniformly sampled.
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = rng.uniform_int(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(take);
    return {std::move(candidates), take};
}

Insertion insert_answer(std::span<const std::vector<std::string>> sentences,
                        const std::vector<std::string>& answer, std::size_t slot) {
    if (slot > sentences.size()) throw std::out_of_range("insert_answer: slot beyond m");
    Insertion ins;
    for (std::size_t i = 0; i < slot; ++i) {
        ins.right_side.insert(ins.right_side.end(), sentences[i].begin(), sentences[i].end());
    }
    ins.prefix_len = ins.right_side.size();
    ins.right_side.insert(ins.right_side.end(), answer.begin(), answer.end());
    for (std::size_t i = slot; i < sentences.size(); ++i) {
        ins.right_side.insert(ins.right_side.end(), sentences[i].begin(), sentences[i].end());
    }
    return ins;
}

GenOutcome generate_example(const QACorpus& qa, std::size_t current,
                            const ReviewCorpus& reviews,
                            std::span<const std::size_t> entity_reviews,
                            const GenConfig& cfg, std::size_t repeat,
                            const Tokenizer& tokenizer, ForceLabel force) {
    GenOutcome outcome;
    if (entity_reviews.empty()) {
        outcome.skip_reason = SkipReason::no_reviews;
        return outcome;
    }
    const QAPair& pair = qa[current];
    const auto pool = qa.entity(pair.entity_id);
    Rng rng(derive_seed(cfg.seed, pair.pair_id, repeat, SeedStream::generate));

    // Draw order is part of the reproducibility contract: h, context,
    // coin, distractor, review, slot.
    const std::size_t h = rng.uniform_int(0, cfg.h_max);
    ContextSample ctx = sample_context(pool, current, h, rng);

    bool negative = rng.uniform01() >= 1.0 - cfg.neg_prob;
    if (force != ForceLabel::none) negative = force == ForceLabel::negative;

    PretuneExample ex;
    ex.pair_id = pair.pair_id;
    ex.repeat = repeat;
    ex.h_drawn = h;

    const std::string* inserted = &pair.answer;
    if (negative) {
        if (pool.size() < 2) {
            negative = false;
            ex.negative_fallback = true;
        } else {
            std::size_t j = rng.uniform_int(0, pool.size() - 2);
            // Skip over the current pair's position in the pool.
            if (pool[j] == current) j = pool.size() - 1;
            inserted = &qa[pool[j]].answer;
            ex.distractor_pair_id = qa[pool[j]].pair_id;
        }
    }
    ex.is_negative = negative;

    const Review& review = reviews[entity_reviews[rng.uniform_int(0, entity_reviews.size() - 1)]];
    ex.review_id = review.review_id;
    std::size_t slot = rng.uniform_int(0, review.sentences.size());

    std::vector<TokenPair> context;
    context.reserve(ctx.indices.size());
    for (std::size_t idx : ctx.indices) {
        context.emplace_back(tokens_of(tokenizer, qa[idx].question),
                             tokens_of(tokenizer, qa[idx].answer));
    }
    std::size_t kept = 0;
    std::vector<std::string> tokens = assemble_left_tokens(
        context, tokens_of(tokenizer, pair.question), cfg.max_left, &kept);
    ex.h_used = kept;
    ex.context_truncated = kept < ctx.h_used;
    ex.left_len = tokens.size();

    const std::vector<std::string> answer = tokens_of(tokenizer, *inserted);
    const std::size_t budget = cfg.max_len - ex.left_len - 1;
    if (answer.size() > budget) {
        outcome.skip_reason = SkipReason::answer_too_long;
        return outcome;
    }

    std::vector<std::vector<std::string>> sentences;
    sentences.reserve(review.sentences.size());
    for (const auto& s : review.sentences) sentences.push_back(tokens_of(tokenizer, s));

    // Largest slot whose prefix still leaves room for the whole answer.
    std::size_t prefix = 0;
    std::size_t max_slot = 0;
    for (std::size_t l = 0; l <= sentences.size(); ++l) {
        if (prefix + answer.size() > budget) break;
        max_slot = l;
        if (l < sentences.size()) prefix += sentences[l].size();
    }
    slot = std::min(slot, max_slot);
    ex.slot = slot;

    Insertion ins = insert_answer(sentences, answer, slot);
    if (ins.right_side.size() > budget) ins.right_side.resize(budget);

    tokens.insert(tokens.end(), ins.right_side.begin(), ins.right_side.end());
    tokens.emplace_back(surface(SpecialToken::sep));
    ex.tokens = std::move(tokens);

    if (negative) {
        ex.span = {0, 0};
        ex.answer_leak =
            find_subsequence(ins.right_side, tokens_of(tokenizer, pair.answer)).has_value();
    } else {
        ex.span.u = ex.left_len + ins.prefix_len;
        ex.span.v = ex.span.u + answer.size() - 1;
    }
    outcome.example = std::move(ex);
    return outcome;
}

void GenReport::add(const GenOutcome& outcome) {
    ++attempts;
    if (!outcome.example) {
        ++skipped;
        if (outcome.skip_reason == SkipReason::answer_too_long) ++skipped_answer_too_long;
        if (outcome.skip_reason == SkipReason::no_reviews) ++skipped_no_reviews;
        return;
    }
    const PretuneExample& ex = *outcome.example;
    ++emitted;
    if (ex.is_negative) {
        ++negatives;
    } else {
        ++positives;
    }
    if (ex.negative_fallback) ++negative_fallbacks;
    if (ex.answer_leak) ++answer_leaks;
    if (ex.context_truncated) ++context_truncated;
    if (h_histogram.size() <= ex.h_used) h_histogram.resize(ex.h_used + 1, 0);
    ++h_histogram[ex.h_used];
}

void GenReport::merge(const GenReport& o) {
    attempts += o.attempts;
    emitted += o.emitted;
    skipped += o.skipped;
    skipped_answer_too_long += o.skipped_answer_too_long;
    skipped_no_reviews += o.skipped_no_reviews;
    positives += o.positives;
    negatives += o.negatives;
    negative_fallbacks += o.negative_fallbacks;
    answer_leaks += o.answer_leaks;
    context_truncated += o.context_truncated;
    if (h_histogram.size() < o.h_histogram.size()) h_histogram.resize(o.h_histogram.size(), 0);
    for (std::size_t i = 0; i < o.h_histogram.size(); ++i) h_histogram[i] += o.h_histogram[i];
}

std::vector<std::size_t> generation_order(const QACorpus& qa, const ReviewCorpus& reviews) {
    bool overlap = false;
    for (const auto& entity : qa.entity_ids()) {
        if (!reviews.entity(entity).empty()) {
            overlap = true;
            break;
        }
    }
    if (!overlap && !qa.empty()) {
        throw DataError("QA corpus (" + std::to_string(qa.entity_ids().size()) +
                        " entities) and review corpus (" +
                        std::to_string(reviews.entity_ids().size()) +
                        " entities) share no entity_id");
    }
    std::vector<std::size_t> order(qa.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return qa[a].pair_id < qa[b].pair_id; });
    return order;
}

std::vector<GenOutcome> generate_batch_serial(const QACorpus& qa, const ReviewCorpus& reviews,
                                              std::span<const GenTask> tasks,
                                              const GenConfig& cfg,
                                              const Tokenizer& tokenizer) {
    std::vector<GenOutcome> out;
    out.reserve(tasks.size());
    for (const GenTask& t : tasks) {
        out.push_back(generate_example(qa, t.pair, reviews, reviews.entity(qa[t.pair].entity_id),
                                       cfg, t.repeat, tokenizer));
    }
    return out;
}

std::vector<GenOutcome> generate_batch(const QACorpus& qa, const ReviewCorpus& reviews,
                                       std::span<const GenTask> tasks, const GenConfig& cfg,
                                       const Tokenizer& tokenizer) {
    std::vector<GenOutcome> out(tasks.size());
    const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const GenTask& t = tasks[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = generate_example(
            qa, t.pair, reviews, reviews.entity(qa[t.pair].entity_id), cfg, t.repeat, tokenizer);
    }
    return out;
}

GenReport generate_dataset(const QACorpus& qa, const ReviewCorpus& reviews,
                           const GenConfig& cfg, const Tokenizer& tokenizer,
                           const ExampleSink& sink, std::size_t batch_size) {
    cfg.validate();
    const std::vector<std::size_t> order = generation_order(qa, reviews);
    GenReport report;
    report.h_histogram.assign(cfg.h_max + 1, 0);
    std::vector<GenTask> tasks;
    tasks.reserve(batch_size);
    auto flush = [&] {
        for (const GenOutcome& o : generate_batch(qa, reviews, tasks, cfg, tokenizer)) {
            report.add(o);
            if (o.example) sink(*o.example);
        }
        tasks.clear();
    };
    for (std::size_t r = 0; r < cfg.k_repeats; ++r) {
        for (std::size_t idx : order) {
            tasks.push_back({r, idx});
            if (tasks.size() == batch_size) flush();
        }
    }
    if (!tasks.empty()) flush();
    return report;
}

}  // namespace rcrc
