#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rcrc/error.hpp"
#include "rcrc/random.hpp"
#include "rcrc/tokenizer.hpp"
#include "rcrc/utf8.hpp"

using namespace rcrc;

namespace {

using Strings = std::vector<std::string>;

// Brute force: every token overlapping [begin, end).
std::optional<TokenSpan> covering_oracle(const TokenSeq& seq, CharSpan c) {
    std::optional<TokenSpan> out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const CharSpan o = seq.offsets()[i];
        if (o.begin < c.end && o.end > c.begin) {
            if (!out) out = TokenSpan{i, i};
            out->v = i;
        }
    }
    return out;
}

std::string random_text(Rng& rng) {
    static const Strings pieces = {"great", "SSD", "fast", "Mr.", "don't", "3.5", "?", "!",
                                   "(nice)", "\"ok\"", "é", "café", "—", "x", "  ", "\t", "\n",
                                   "it's", "...", "a,b"};
    std::string s;
    const std::size_t n = rng.uniform_int(0, 12);
    for (std::size_t i = 0; i < n; ++i) {
        s += pieces[rng.uniform_int(0, pieces.size() - 1)];
        if (rng.uniform_int(0, 2) > 0) s += ' ';
    }
    return s;
}

}  // namespace

TEST_CASE("tokenize splits on whitespace and peels punctuation") {
    CHECK(tokenize("how is retina display ?").tokens() ==
          Strings{"how", "is", "retina", "display", "?"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \n ").empty());

    const TokenSeq seq = tokenize("SSD storage.");
    CHECK(seq.tokens() == Strings{"ssd", "storage", "."});
    CHECK(seq.offsets() == std::vector<CharSpan>{{0, 3}, {4, 11}, {11, 12}});

    CHECK(tokenize("(nice!)").tokens() == Strings{"(", "nice", "!", ")"});
    CHECK(tokenize("don't 3.5").tokens() == Strings{"don't", "3.5"});
}

TEST_CASE("special surfaces never come out of ordinary text") {
    for (const char* text : {"[CLS] hello [SEP]", "[Q] and [A]", "[MASK]", "[mask]x"}) {
        for (const auto& t : tokenize(text).tokens()) CHECK_FALSE(is_special(t));
    }
}

TEST_CASE("offsets count code points, not bytes") {
    const TokenSeq seq = tokenize("café great");
    REQUIRE(seq.size() == 2);
    CHECK(seq.offsets()[0] == CharSpan{0, 4});
    CHECK(seq.offsets()[1] == CharSpan{5, 10});
    CHECK(detokenize(seq, {1, 1}) == "great");
    CHECK(tokenize("CAFÉ").tokens() == Strings{"café"});
}

TEST_CASE("char_span_to_token_span expands to covering tokens") {
    const TokenSeq seq = tokenize("ssd storage .");
    CHECK(char_span_to_token_span(seq, {4, 11}) == TokenSpan{1, 1});
    // "sd stor", mid-token on both sides
    CHECK(char_span_to_token_span(seq, {1, 8}) == TokenSpan{0, 1});
    CHECK(char_span_to_token_span(seq, {1, 8}) == *covering_oracle(seq, {1, 8}));
    CHECK_THROWS_AS(char_span_to_token_span(seq, {3, 4}), AlignmentError);
    CHECK_THROWS_AS(char_span_to_token_span(seq, {5, 5}), std::out_of_range);
    CHECK_THROWS_AS(char_span_to_token_span(seq, {5, 99}), std::out_of_range);
}

TEST_CASE("char_span_to_token_span matches the brute-force oracle on every range") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string text = random_text(rng);
        const TokenSeq seq = tokenize(text);
        const std::size_t n = utf8::length(text);
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t e = b + 1; e <= n; ++e) {
                const auto want = covering_oracle(seq, {b, e});
                if (want) {
                    const TokenSpan got = char_span_to_token_span(seq, {b, e});
                    REQUIRE(got == *want);
                    // re-projecting the expanded range is a fixed point
                    REQUIRE(char_span_to_token_span(seq, token_span_to_char_span(seq, got)) == got);
                } else {
                    REQUIRE_THROWS_AS(char_span_to_token_span(seq, {b, e}), AlignmentError);
                }
            }
        }
    }
}

TEST_CASE("offset reconstruction equals whitespace-collapsed text") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::string text = random_text(rng);
        const TokenSeq seq = tokenize(text);
        std::string rebuilt;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const CharSpan o = seq.offsets()[i];
            REQUIRE(o.begin < o.end);
            if (i > 0) {
                REQUIRE(seq.offsets()[i - 1].end <= o.begin);
                if (seq.offsets()[i - 1].end < o.begin) rebuilt.push_back(' ');
            }
            const std::string surface = utf8::substr(text, o.begin, o.end);
            REQUIRE(utf8::to_lower(surface) == seq[i]);
            rebuilt += surface;
        }
        REQUIRE(rebuilt == utf8::collapse_whitespace(text));
    }
}

TEST_CASE("detokenize") {
    const TokenSeq seq = tokenize("how is retina display ?");
    CHECK(detokenize(seq, {0, 4}) == "how is retina display ?");
    CHECK(detokenize(seq, {2, 3}) == "retina display");
    CHECK_THROWS_AS(detokenize(seq, {3, 2}), std::out_of_range);
    CHECK_THROWS_AS(detokenize(seq, {0, 5}), std::out_of_range);
    // keeps source casing and spacing
    CHECK(detokenize(tokenize("The  SSD storage"), {1, 2}) == "SSD storage");

    const TokenSeq joined = TokenSeq::from_tokens({"[CLS]", "[Q]", "why", "?"});
    CHECK(detokenize(joined, {2, 3}) == "why ?");
}

TEST_CASE("word-piece tokenizer") {
    const auto dir = std::filesystem::temp_directory_path() / "rcrc_vocab_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "vocab.txt";
    {
        std::ofstream out(path);
        out << "[CLS]\n[SEP]\n[Q]\n[A]\n[MASK]\n[UNK]\nretina\nstor\n##age\nssd\n.\n";
    }
    const Tokenizer tok(load_vocab(path));
    const TokenSeq seq = tok.tokenize("Retina SSD storage. zzz");
    CHECK(seq.tokens() == Strings{"retina", "ssd", "stor", "##age", ".", "[UNK]"});
    CHECK(seq.offsets()[2] == CharSpan{11, 15});
    CHECK(seq.offsets()[3] == CharSpan{15, 18});
    CHECK(seq.offsets()[5] == CharSpan{20, 23});
    CHECK(char_span_to_token_span(seq, {11, 18}) == TokenSpan{2, 3});

    {
        std::ofstream out(dir / "bad.txt");
        out << "hello\n[SEP]\n[Q]\n[A]\n[MASK]\n";
    }
    CHECK_THROWS_AS(load_vocab(dir / "bad.txt"), DataError);
    CHECK_THROWS_AS(load_vocab(dir / "missing.txt"), DataError);
}

TEST_CASE("find_subsequence") {
    const Strings hay = {"a", "b", "c", "b", "c"};
    CHECK(find_subsequence(hay, {"b", "c"}) == 1u);
    CHECK(find_subsequence(hay, {"b", "c"}, 2) == 3u);
    CHECK_FALSE(find_subsequence(hay, {"b", "c"}, 0, 2).has_value());
    CHECK_FALSE(find_subsequence(hay, {}).has_value());
}
