#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcrc/tokenizer.hpp"

namespace rcrc {

struct QAPair {
    std::string pair_id;
    std::string entity_id;
    std::string question;
    std::string answer;
};

struct Review {
    std::string review_id;
    std::string entity_id;
    std::vector<std::string> sentences;
};

struct Turn {
    int turn_id = 0;
    std::string question;
    std::string gold_answer_text;
    // Code-point span into the dialogue's review text; empty for NO ANSWER.
    std::optional<CharSpan> gold_span;

    bool is_no_answer() const { return !gold_span.has_value(); }
};

struct Dialogue {
    std::string dialogue_id;
    std::string review_id;
    std::string review_text;
    std::vector<Turn> turns;
};

// A per-record problem found while loading. `line` is 1-based for JSONL
// inputs and 0 for whole-document formats.
struct LoadIssue {
    std::size_t line = 0;
    std::string record_id;
    std::string message;
};

// Records grouped by entity. Insertion order is preserved both globally and
// within each entity.
template <typename Record>
class EntityCorpus {
public:
    void add(Record record) {
        by_entity_[record.entity_id].push_back(records_.size());
        records_.push_back(std::move(record));
    }

    const std::vector<Record>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const Record& operator[](std::size_t i) const { return records_[i]; }

    // Indices of all records belonging to `entity_id`.
    std::span<const std::size_t> entity(std::string_view entity_id) const {
        auto it = by_entity_.find(std::string(entity_id));
        if (it == by_entity_.end()) return {};
        return it->second;
    }

    std::vector<std::string> entity_ids() const {
        std::vector<std::string> ids;
        ids.reserve(by_entity_.size());
        for (const auto& [id, _] : by_entity_) ids.push_back(id);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

private:
    std::vector<Record> records_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_entity_;
};

using QACorpus = EntityCorpus<QAPair>;
using ReviewCorpus = EntityCorpus<Review>;

template <typename T>
struct Loaded {
    T value;
    std::vector<LoadIssue> issues;
};

struct DialogueSet {
    std::vector<Dialogue> dialogues;
    // Answer spans that matched the story slice verbatim (up to whitespace)
    // vs. only after tokenizer normalization.
    std::size_t spans_matched_raw = 0;
    std::size_t spans_matched_normalized = 0;
};

// Rule-based sentence splitter: breaks after a run of [.?!] (plus closing
// quotes/brackets) that is followed by whitespace and an uppercase letter
// (optionally behind opening quotes/brackets),
// or by end of text. Known abbreviations never end a sentence.
std::vector<std::string> segment_sentences(std::string_view text);

// The loaders throw DataError when the file cannot be read (or, for CoQA
// JSON, cannot be parsed). Everything else is reported per record.
Loaded<QACorpus> load_qa_pairs(const std::filesystem::path& path);
Loaded<ReviewCorpus> load_reviews(const std::filesystem::path& path);
Loaded<DialogueSet> load_rcrc_dialogues(const std::filesystem::path& path);

Loaded<QACorpus> read_qa_pairs(std::istream& in);
Loaded<ReviewCorpus> read_reviews(std::istream& in);
Loaded<DialogueSet> parse_rcrc_dialogues(std::string_view json_text);

void write_qa_pairs(std::ostream& out, const QACorpus& corpus);
void write_reviews(std::ostream& out, const ReviewCorpus& corpus);
// CoQA-shaped JSON; NO ANSWER turns get span_start = span_end = -1 and
// span_text "unknown".
void write_dialogues(std::ostream& out, const std::vector<Dialogue>& dialogues);

}  // namespace rcrc
