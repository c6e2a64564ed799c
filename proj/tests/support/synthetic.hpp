#pragma once

#include <cstddef>
#include <cstdint>

#include "rcrc/corpus.hpp"

namespace rcrc::testing {

struct SyntheticShape {
    std::size_t entities = 20;
    std::size_t pairs_per_entity = 50;
    std::size_t reviews_per_entity = 10;
    // Keeps 9 context turns under a 96-token left side.
    std::size_t max_question_words = 4;
    std::size_t max_answer_words = 2;
    std::size_t max_sentences = 6;
    std::size_t max_sentence_words = 10;
    std::uint64_t seed = 7;
};

struct SyntheticCorpus {
    QACorpus qa;
    ReviewCorpus reviews;
};

// Random multi-entity corpus over a small English-like word list. Pair and
// review ids are zero-padded so their lexical order matches creation order.
SyntheticCorpus make_synthetic_corpus(const SyntheticShape& shape = {});

}  // namespace rcrc::testing
