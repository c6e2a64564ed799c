#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rcrc {

enum class SpecialToken { cls, sep, q, a, mask };

inline constexpr std::array<std::string_view, 5> kSpecialSurfaces = {
    "[CLS]", "[SEP]", "[Q]", "[A]", "[MASK]"};

constexpr std::string_view surface(SpecialToken t) {
    return kSpecialSurfaces[static_cast<std::size_t>(t)];
}

bool is_special(std::string_view token);

inline constexpr std::string_view kUnknownToken = "[UNK]";

// Half-open code-point range into the source text.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

// Inclusive token range.
struct TokenSpan {
    std::size_t u = 0;
    std::size_t v = 0;

    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

// Tokens of one source text with per-token code-point offsets. A sequence
// assembled from several sources (e.g. a left side) carries no source and no
// offsets.
class TokenSeq {
public:
    TokenSeq() = default;
    TokenSeq(std::string source, std::vector<std::string> tokens,
             std::vector<CharSpan> offsets);

    static TokenSeq from_tokens(std::vector<std::string> tokens);

    const std::vector<std::string>& tokens() const& { return tokens_; }
    const std::vector<CharSpan>& offsets() const& { return offsets_; }
    // By value on temporaries, so `for (auto& t : tokenize(s).tokens())` is safe.
    std::vector<std::string> tokens() && { return std::move(tokens_); }
    std::vector<CharSpan> offsets() && { return std::move(offsets_); }
    const std::string& source() const { return source_; }
    bool has_source() const { return has_source_; }

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }
    const std::string& operator[](std::size_t i) const { return tokens_[i]; }

private:
    std::string source_;
    bool has_source_ = false;
    std::vector<std::string> tokens_;
    std::vector<CharSpan> offsets_;
};

// Reads a vocabulary file: one token per line, line number = id. The first
// five entries must be exactly the special tokens, in any order.
std::vector<std::string> load_vocab(const std::filesystem::path& path);

// Whitespace+punctuation tokenizer with lowercasing. Optionally refines each
// word into greedy longest-match word pieces ("##" continuation prefix) when
// constructed with a vocabulary.
class Tokenizer {
public:
    Tokenizer() = default;
    explicit Tokenizer(std::vector<std::string> vocab);

    TokenSeq tokenize(std::string_view text) const;

    bool uses_word_pieces() const { return !vocab_.empty(); }
    const std::vector<std::string>& vocab() const { return vocab_; }

private:
    void split_word(const std::string& word, CharSpan span,
                    std::vector<std::string>& tokens,
                    std::vector<CharSpan>& offsets) const;

    std::vector<std::string> vocab_;
    std::unordered_map<std::string, std::size_t> ids_;
};

// Default-scheme tokenization.
TokenSeq tokenize(std::string_view text);

// Minimal inclusive token range covering the code-point range [begin, end).
// Throws AlignmentError when no token overlaps the range, std::out_of_range
// when the range is invalid for the source.
TokenSpan char_span_to_token_span(const TokenSeq& seq, CharSpan chars);

// Code-point range spanned by tokens u..v.
CharSpan token_span_to_char_span(const TokenSeq& seq, TokenSpan span);

// Source slice for tokens u..v, or the tokens joined by single spaces when
// the sequence has no source. Throws std::out_of_range on bad indices.
std::string detokenize(const TokenSeq& seq, TokenSpan span);

// Start of the first contiguous occurrence of `needle` in
// haystack[from, to), if any.
std::optional<std::size_t> find_subsequence(
    const std::vector<std::string>& haystack,
    const std::vector<std::string>& needle, std::size_t from = 0,
    std::size_t to = static_cast<std::size_t>(-1));

}  // namespace rcrc
