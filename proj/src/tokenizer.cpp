#include "rcrc/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "rcrc/error.hpp"
#include "rcrc/utf8.hpp"

namespace rcrc {

namespace {

constexpr std::size_t kMaxWordChars = 100;

struct Word {
    std::size_t begin = 0;  // code points
    std::size_t end = 0;
};

// Whitespace split, then leading and trailing punctuation peeled off one
// character at a time.
std::vector<Word> basic_split(const utf8::Decoded& d) {
    std::vector<Word> words;
    std::size_t i = 0;
    const std::size_t n = d.size();
    while (i < n) {
        while (i < n && utf8::is_space(d.code_points[i])) ++i;
        if (i == n) break;
        std::size_t j = i;
        while (j < n && !utf8::is_space(d.code_points[j])) ++j;

        std::size_t b = i;
        std::size_t e = j;
        while (b < e && utf8::is_punct(d.code_points[b])) {
            words.push_back({b, b + 1});
            ++b;
        }
        std::size_t trailing_begin = e;
        while (trailing_begin > b && utf8::is_punct(d.code_points[trailing_begin - 1])) {
            --trailing_begin;
        }
        if (b < trailing_begin) words.push_back({b, trailing_begin});
        for (std::size_t k = trailing_begin; k < e; ++k) words.push_back({k, k + 1});
        i = j;
    }
    return words;
}

std::string lowered(const utf8::Decoded& d, Word w) {
    std::string out;
    for (std::size_t k = w.begin; k < w.end; ++k) {
        utf8::append(out, utf8::to_lower(d.code_points[k]));
    }
    return out;
}

}  // namespace

bool is_special(std::string_view token) {
    return std::find(kSpecialSurfaces.begin(), kSpecialSurfaces.end(), token) !=
           kSpecialSurfaces.end();
}

TokenSeq::TokenSeq(std::string source, std::vector<std::string> tokens,
                   std::vector<CharSpan> offsets)
    : source_(std::move(source)),
      has_source_(true),
      tokens_(std::move(tokens)),
      offsets_(std::move(offsets)) {
    if (tokens_.size() != offsets_.size()) {
        throw std::invalid_argument("TokenSeq: tokens and offsets differ in length");
    }
}

TokenSeq TokenSeq::from_tokens(std::vector<std::string> tokens) {
    TokenSeq seq;
    seq.tokens_ = std::move(tokens);
    return seq;
}

std::vector<std::string> load_vocab(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read vocabulary file " + path.string());
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        vocab.push_back(line);
    }
    if (vocab.size() < kSpecialSurfaces.size()) {
        throw DataError("vocabulary " + path.string() +
                        " has fewer entries than the special tokens");
    }
    std::set<std::string_view> head(vocab.begin(),
                                    vocab.begin() + kSpecialSurfaces.size());
    std::set<std::string_view> want(kSpecialSurfaces.begin(), kSpecialSurfaces.end());
    if (head != want) {
        throw DataError("vocabulary " + path.string() +
                        ": the first five ids must be [CLS] [SEP] [Q] [A] [MASK]");
    }
    return vocab;
}

Tokenizer::Tokenizer(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {
    for (std::size_t i = 0; i < vocab_.size(); ++i) ids_.emplace(vocab_[i], i);
}

void Tokenizer::split_word(const std::string& word, CharSpan span,
                           std::vector<std::string>& tokens,
                           std::vector<CharSpan>& offsets) const {
    const utf8::Decoded d = utf8::decode(word);
    const std::size_t n = d.size();
    if (n > kMaxWordChars) {
        tokens.emplace_back(kUnknownToken);
        offsets.push_back(span);
        return;
    }
    std::vector<std::string> pieces;
    std::vector<CharSpan> piece_offsets;
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = n;
        std::string found;
        while (end > start) {
            std::string candidate = start > 0 ? "##" : "";
            candidate.append(word, d.byte_offsets[start],
                             d.byte_offsets[end] - d.byte_offsets[start]);
            if (ids_.contains(candidate)) {
                found = std::move(candidate);
                break;
            }
            --end;
        }
        if (found.empty()) {
            tokens.emplace_back(kUnknownToken);
            offsets.push_back(span);
            return;
        }
        pieces.push_back(std::move(found));
        piece_offsets.push_back({span.begin + start, span.begin + end});
        start = end;
    }
    tokens.insert(tokens.end(), pieces.begin(), pieces.end());
    offsets.insert(offsets.end(), piece_offsets.begin(), piece_offsets.end());
}

TokenSeq Tokenizer::tokenize(std::string_view text) const {
    const utf8::Decoded d = utf8::decode(text);
    std::vector<std::string> tokens;
    std::vector<CharSpan> offsets;
    for (const Word& w : basic_split(d)) {
        std::string word = lowered(d, w);
        if (uses_word_pieces()) {
            split_word(word, {w.begin, w.end}, tokens, offsets);
        } else {
            tokens.push_back(std::move(word));
            offsets.push_back({w.begin, w.end});
        }
    }
    return TokenSeq(std::string(text), std::move(tokens), std::move(offsets));
}

TokenSeq tokenize(std::string_view text) {
    static const Tokenizer kDefault;
    return kDefault.tokenize(text);
}

TokenSpan char_span_to_token_span(const TokenSeq& seq, CharSpan chars) {
    if (!seq.has_source()) {
        throw std::invalid_argument("char_span_to_token_span: sequence has no source");
    }
    if (chars.begin >= chars.end || chars.end > utf8::length(seq.source())) {
        throw std::out_of_range("char_span_to_token_span: invalid character range");
    }
    const auto& offs = seq.offsets();
    // First token ending after begin, last token starting before end.
    auto first = std::partition_point(offs.begin(), offs.end(),
                                      [&](const CharSpan& s) { return s.end <= chars.begin; });
    auto last = std::partition_point(offs.begin(), offs.end(),
                                     [&](const CharSpan& s) { return s.begin < chars.end; });
    if (first == offs.end() || first >= last) {
        throw AlignmentError("character range [" + std::to_string(chars.begin) + ", " +
                             std::to_string(chars.end) + ") covers no token");
    }
    return {static_cast<std::size_t>(first - offs.begin()),
            static_cast<std::size_t>(last - offs.begin()) - 1};
}

CharSpan token_span_to_char_span(const TokenSeq& seq, TokenSpan span) {
    if (!seq.has_source() || span.u > span.v || span.v >= seq.size()) {
        throw std::out_of_range("token_span_to_char_span: invalid token range");
    }
    return {seq.offsets()[span.u].begin, seq.offsets()[span.v].end};
}

std::string detokenize(const TokenSeq& seq, TokenSpan span) {
    if (span.u > span.v || span.v >= seq.size()) {
        throw std::out_of_range("detokenize: invalid token range");
    }
    if (seq.has_source()) {
        const CharSpan c = token_span_to_char_span(seq, span);
        return utf8::substr(seq.source(), c.begin, c.end);
    }
    std::string out;
    for (std::size_t i = span.u; i <= span.v; ++i) {
        if (i > span.u) out.push_back(' ');
        out += seq[i];
    }
    return out;
}

std::optional<std::size_t> find_subsequence(const std::vector<std::string>& haystack,
                                            const std::vector<std::string>& needle,
                                            std::size_t from, std::size_t to) {
    to = std::min(to, haystack.size());
    if (needle.empty() || from >= to || to - from < needle.size()) return std::nullopt;
    auto first = haystack.begin() + static_cast<std::ptrdiff_t>(from);
    auto last = haystack.begin() + static_cast<std::ptrdiff_t>(to);
    auto it = std::search(first, last, needle.begin(), needle.end());
    if (it == last) return std::nullopt;
    return static_cast<std::size_t>(it - haystack.begin());
}

}  // namespace rcrc
