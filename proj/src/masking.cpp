#include "rcrc/masking.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rcrc/error.hpp"

namespace rcrc {

void MaskPolicy::validate() const {
    for (double p : {mask_rate, replace_with_mask, replace_with_random, keep_original}) {
        if (!(p >= 0.0 && p <= 1.0)) throw UsageError("mask probabilities must lie in [0, 1]");
    }
    if (std::abs(replace_with_mask + replace_with_random + keep_original - 1.0) > 1e-9) {
        throw UsageError("mask sub-policy probabilities must sum to 1");
    }
}

std::string_view to_string(MaskAction action) {
    switch (action) {
        case MaskAction::mask: return "mask";
        case MaskAction::random: return "random";
        case MaskAction::keep: return "keep";
    }
    return "mask";
}

MaskAction parse_mask_action(std::string_view text) {
    if (text == "mask") return MaskAction::mask;
    if (text == "random") return MaskAction::random;
    if (text == "keep") return MaskAction::keep;
    throw DataError("unknown mask action '" + std::string(text) + "'");
}

MaskedExample apply_masking(std::span<const std::string> tokens, std::optional<TokenSpan> answer,
                            const MaskPolicy& policy,
                            std::span<const std::string> replacement_vocab, Rng& rng) {
    MaskedExample out;
    out.tokens.assign(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (is_special(tokens[i])) continue;
        if (policy.protect_span && answer && i >= answer->u && i <= answer->v) continue;
        if (!(rng.uniform01() < policy.mask_rate)) continue;

        MaskRecord rec{i, tokens[i], MaskAction::keep};
        const double action = rng.uniform01();
        if (action < policy.replace_with_mask) {
            rec.action = MaskAction::mask;
            out.tokens[i] = surface(SpecialToken::mask);
        } else if (action < policy.replace_with_mask + policy.replace_with_random &&
                   !replacement_vocab.empty()) {
            rec.action = MaskAction::random;
            out.tokens[i] = replacement_vocab[rng.uniform_int(0, replacement_vocab.size() - 1)];
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::vector<std::string> unmask(std::vector<std::string> tokens,
                                std::span<const MaskRecord> records) {
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        tokens.at(it->position) = it->original;
    }
    return tokens;
}

std::vector<std::string> replacement_vocabulary(std::span<const std::string> tokens) {
    std::set<std::string> distinct;
    for (const auto& t : tokens) {
        if (!is_special(t) && t != kUnknownToken && t != "[PAD]") distinct.insert(t);
    }
    return {distinct.begin(), distinct.end()};
}

std::vector<MaskedExample> mask_batch_serial(std::span<const MaskJob> jobs,
                                             const MaskPolicy& policy,
                                             std::span<const std::string> replacement_vocab) {
    std::vector<MaskedExample> out;
    out.reserve(jobs.size());
    for (const MaskJob& job : jobs) {
        Rng rng(job.seed);
        out.push_back(apply_masking(job.tokens, job.answer, policy, replacement_vocab, rng));
    }
    return out;
}

std::vector<MaskedExample> mask_batch(std::span<const MaskJob> jobs, const MaskPolicy& policy,
                                      std::span<const std::string> replacement_vocab) {
    std::vector<MaskedExample> out(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const MaskJob& job = jobs[static_cast<std::size_t>(i)];
        Rng rng(job.seed);
        out[static_cast<std::size_t>(i)] =
            apply_masking(job.tokens, job.answer, policy, replacement_vocab, rng);
    }
    return out;
}

}  // namespace rcrc
