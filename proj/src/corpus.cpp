#include "rcrc/corpus.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "rcrc/error.hpp"
#include "rcrc/random.hpp"
#include "rcrc/utf8.hpp"

namespace rcrc {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 24> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g",
    "i.e", "inc", "ltd", "co", "corp", "mt", "no", "approx", "dept", "est",
    "fig", "u.s", "a.m"};

bool is_terminal(char32_t cp) { return cp == '.' || cp == '?' || cp == '!'; }

bool is_opener(char32_t cp) {
    switch (cp) {
        case '"': case '\'': case '(': case '[': case '{':
        case 0x2018: case 0x201C: case 0xAB:
            return true;
        default:
            return false;
    }
}

bool is_closer(char32_t cp) {
    switch (cp) {
        case '"': case '\'': case ')': case ']': case '}':
        case 0x2019: case 0x201D: case 0xBB:
            return true;
        default:
            return false;
    }
}

// Word immediately before `dot` (exclusive), lowercased, without the dot.
bool is_abbreviation(const utf8::Decoded& d, std::size_t dot) {
    std::size_t b = dot;
    while (b > 0 && !utf8::is_space(d.code_points[b - 1])) --b;
    while (b < dot && (d.code_points[b] == '(' || d.code_points[b] == '"')) ++b;
    std::string word;
    for (std::size_t k = b; k < dot; ++k) utf8::append(word, utf8::to_lower(d.code_points[k]));
    for (std::string_view a : kAbbreviations) {
        if (word == a) return true;
    }
    return false;
}

std::string slice(std::string_view text, const utf8::Decoded& d, std::size_t b,
                  std::size_t e) {
    return std::string(text.substr(d.byte_offsets[b], d.byte_offsets[e] - d.byte_offsets[b]));
}

std::string trimmed(std::string_view s) { return std::string(utf8::trim(s)); }

// Required non-empty string field; returns an error message or empty.
std::string require_text(const json& rec, const char* field, std::string& out) {
    auto it = rec.find(field);
    if (it == rec.end()) return std::string("missing field '") + field + "'";
    if (!it->is_string()) return std::string("field '") + field + "' is not a string";
    out = it->get<std::string>();
    if (utf8::trim(out).empty()) return std::string("field '") + field + "' is empty";
    return {};
}

template <typename Record, typename Parse>
Loaded<EntityCorpus<Record>> read_jsonl(std::istream& in, const char* id_field,
                                        Parse parse) {
    Loaded<EntityCorpus<Record>> result;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (utf8::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            result.issues.push_back({line_no, "", std::string("invalid JSON: ") + e.what()});
            continue;
        }
        if (!rec.is_object()) {
            result.issues.push_back({line_no, "", "record is not a JSON object"});
            continue;
        }
        std::string id;
        if (auto err = require_text(rec, id_field, id); !err.empty()) {
            result.issues.push_back({line_no, "", err});
            continue;
        }
        Record record;
        if (auto err = parse(rec, record); !err.empty()) {
            result.issues.push_back({line_no, id, err});
            continue;
        }
        if (!seen.insert(id).second) {
            result.issues.push_back({line_no, id, std::string("duplicate ") + id_field});
            continue;
        }
        result.value.add(std::move(record));
    }
    if (in.bad()) throw DataError("read error");
    return result;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    return in;
}

std::string tokenized_form(std::string_view text) {
    std::string out;
    for (const auto& t : tokenize(text).tokens()) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

std::string review_key_from_story(const std::string& story) {
    std::ostringstream os;
    os << "story:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(story);
    return os.str();
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
    const utf8::Decoded d = utf8::decode(text);
    const std::size_t n = d.size();
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    auto emit = [&](std::size_t end) {
        std::string s = trimmed(slice(text, d, start, end));
        if (!s.empty()) out.push_back(std::move(s));
        start = end;
    };
    while (i < n) {
        if (!is_terminal(d.code_points[i])) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < n && is_terminal(d.code_points[run_end])) ++run_end;
        std::size_t end = run_end;
        while (end < n && is_closer(d.code_points[end])) ++end;

        std::size_t next = end;
        while (next < n && utf8::is_space(d.code_points[next])) ++next;

        bool boundary = false;
        if (next == n) {
            boundary = true;
        } else if (next > end) {
            std::size_t first = next;
            while (first < n && is_opener(d.code_points[first])) ++first;
            if (first < n && utf8::is_upper(d.code_points[first])) {
                const bool single_dot = run_end == i + 1 && d.code_points[i] == '.';
                boundary = !(single_dot && is_abbreviation(d, i));
            }
        }
        if (boundary) emit(end);
        i = end;
    }
    if (start < n) emit(n);
    return out;
}

Loaded<QACorpus> read_qa_pairs(std::istream& in) {
    return read_jsonl<QAPair>(in, "pair_id", [](const json& rec, QAPair& p) {
        for (auto [field, dst] : {std::pair{"pair_id", &p.pair_id},
                                  std::pair{"entity_id", &p.entity_id},
                                  std::pair{"question", &p.question},
                                  std::pair{"answer", &p.answer}}) {
            if (auto err = require_text(rec, field, *dst); !err.empty()) return err;
        }
        return std::string();
    });
}

Loaded<ReviewCorpus> read_reviews(std::istream& in) {
    return read_jsonl<Review>(in, "review_id", [](const json& rec, Review& r) {
        for (auto [field, dst] : {std::pair{"review_id", &r.review_id},
                                  std::pair{"entity_id", &r.entity_id}}) {
            if (auto err = require_text(rec, field, *dst); !err.empty()) return err;
        }
        if (auto it = rec.find("sentences"); it != rec.end()) {
            if (!it->is_array() || it->empty()) {
                return std::string("field 'sentences' must be a non-empty array");
            }
            for (const auto& s : *it) {
                if (!s.is_string() || utf8::trim(s.get<std::string>()).empty()) {
                    return std::string("empty or non-string sentence");
                }
                r.sentences.push_back(trimmed(s.get<std::string>()));
            }
            return std::string();
        }
        std::string text;
        if (auto err = require_text(rec, "text", text); !err.empty()) return err;
        r.sentences = segment_sentences(text);
        return std::string();
    });
}

Loaded<QACorpus> load_qa_pairs(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_qa_pairs(in);
}

Loaded<ReviewCorpus> load_reviews(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_reviews(in);
}

Loaded<DialogueSet> parse_rcrc_dialogues(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed dialogue JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("data") || !doc["data"].is_array()) {
        throw DataError("dialogue JSON must have a top-level 'data' array");
    }

    Loaded<DialogueSet> result;
    std::unordered_set<std::string> seen;
    std::size_t index = 0;
    for (const auto& item : doc["data"]) {
        ++index;
        std::vector<LoadIssue> issues;
        auto fail = [&](const std::string& id, const std::string& msg) {
            issues.push_back({0, id, msg});
        };

        Dialogue dlg;
        if (item.contains("id") && item["id"].is_string()) {
            dlg.dialogue_id = item["id"].get<std::string>();
        } else {
            dlg.dialogue_id = "#" + std::to_string(index);
            fail(dlg.dialogue_id, "missing dialogue 'id'");
        }
        if (!item.contains("story") || !item["story"].is_string()) {
            fail(dlg.dialogue_id, "missing 'story'");
            result.issues.insert(result.issues.end(), issues.begin(), issues.end());
            continue;
        }
        dlg.review_text = item["story"].get<std::string>();
        if (item.contains("review_id") && item["review_id"].is_string()) {
            dlg.review_id = item["review_id"].get<std::string>();
        } else if (item.contains("filename") && item["filename"].is_string()) {
            dlg.review_id = item["filename"].get<std::string>();
        } else {
            dlg.review_id = review_key_from_story(dlg.review_text);
        }
        if (!seen.insert(dlg.dialogue_id).second) fail(dlg.dialogue_id, "duplicate dialogue id");

        const auto& questions = item.value("questions", json::array());
        const auto& answers = item.value("answers", json::array());
        std::map<int, std::string> qs;
        std::map<int, const json*> as;
        for (const auto& q : questions) {
            if (!q.contains("turn_id") || !q["turn_id"].is_number_integer() ||
                !q.contains("input_text") || !q["input_text"].is_string()) {
                fail(dlg.dialogue_id, "question without integer turn_id or input_text");
                continue;
            }
            qs[q["turn_id"].get<int>()] = q["input_text"].get<std::string>();
        }
        for (const auto& a : answers) {
            if (!a.contains("turn_id") || !a["turn_id"].is_number_integer()) {
                fail(dlg.dialogue_id, "answer without integer turn_id");
                continue;
            }
            as[a["turn_id"].get<int>()] = &a;
        }
        if (qs.empty()) fail(dlg.dialogue_id, "dialogue has no turns");

        const std::size_t story_len = utf8::length(dlg.review_text);
        int expected = 1;
        for (const auto& [turn_id, question] : qs) {
            const std::string where = dlg.dialogue_id + "/" + std::to_string(turn_id);
            if (turn_id != expected) {
                fail(where, "turn ids are not contiguous from 1");
                break;
            }
            ++expected;
            auto ait = as.find(turn_id);
            if (ait == as.end()) {
                fail(where, "question has no answer");
                continue;
            }
            const json& a = *ait->second;
            Turn turn;
            turn.turn_id = turn_id;
            turn.question = question;

            const bool has_start = a.contains("span_start") && a["span_start"].is_number_integer();
            const bool has_end = a.contains("span_end") && a["span_end"].is_number_integer();
            const std::string span_text = a.value("span_text", std::string());
            const std::string input_text = a.value("input_text", std::string());
            long long s = has_start ? a["span_start"].get<long long>() : -1;
            long long e = has_end ? a["span_end"].get<long long>() : -1;
            if (!has_start || !has_end) {
                const std::string t = std::string(utf8::trim(span_text.empty() ? input_text : span_text));
                if (t != "unknown" && t != "NO ANSWER" && !t.empty()) {
                    fail(where, "answer has text but no span offsets");
                    continue;
                }
            }
            if (s < 0 || e < 0) {
                turn.gold_answer_text = "";
                dlg.turns.push_back(std::move(turn));
                continue;
            }
            if (!(s < e) || static_cast<std::size_t>(e) > story_len) {
                fail(where, "span [" + std::to_string(s) + ", " + std::to_string(e) +
                                ") outside story of length " + std::to_string(story_len));
                continue;
            }
            const std::string story_slice = utf8::substr(dlg.review_text, s, e);
            if (utf8::collapse_whitespace(story_slice) == utf8::collapse_whitespace(span_text)) {
                ++result.value.spans_matched_raw;
            } else if (tokenized_form(story_slice) == tokenized_form(span_text)) {
                ++result.value.spans_matched_normalized;
            } else {
                fail(where, "span_text \"" + span_text + "\" does not match story slice \"" +
                                story_slice + "\"");
                continue;
            }
            turn.gold_answer_text = span_text;
            turn.gold_span = CharSpan{static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
            dlg.turns.push_back(std::move(turn));
        }

        if (issues.empty()) {
            result.value.dialogues.push_back(std::move(dlg));
        } else {
            result.issues.insert(result.issues.end(), issues.begin(), issues.end());
        }
    }
    return result;
}

Loaded<DialogueSet> load_rcrc_dialogues(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rcrc_dialogues(buf.str());
}

void write_qa_pairs(std::ostream& out, const QACorpus& corpus) {
    for (const auto& p : corpus.records()) {
        ordered_json rec;
        rec["pair_id"] = p.pair_id;
        rec["entity_id"] = p.entity_id;
        rec["question"] = p.question;
        rec["answer"] = p.answer;
        out << rec.dump() << '\n';
    }
}

void write_reviews(std::ostream& out, const ReviewCorpus& corpus) {
    for (const auto& r : corpus.records()) {
        ordered_json rec;
        rec["review_id"] = r.review_id;
        rec["entity_id"] = r.entity_id;
        rec["sentences"] = r.sentences;
        out << rec.dump() << '\n';
    }
}

void write_dialogues(std::ostream& out, const std::vector<Dialogue>& dialogues) {
    ordered_json doc;
    doc["version"] = "1.0";
    doc["data"] = ordered_json::array();
    for (const auto& d : dialogues) {
        ordered_json item;
        item["id"] = d.dialogue_id;
        item["review_id"] = d.review_id;
        item["story"] = d.review_text;
        item["questions"] = ordered_json::array();
        item["answers"] = ordered_json::array();
        for (const auto& t : d.turns) {
            ordered_json q;
            q["turn_id"] = t.turn_id;
            q["input_text"] = t.question;
            item["questions"].push_back(q);
            ordered_json a;
            a["turn_id"] = t.turn_id;
            if (t.gold_span) {
                a["span_start"] = t.gold_span->begin;
                a["span_end"] = t.gold_span->end;
                a["span_text"] = t.gold_answer_text;
                a["input_text"] = t.gold_answer_text;
            } else {
                a["span_start"] = -1;
                a["span_end"] = -1;
                a["span_text"] = "unknown";
                a["input_text"] = "unknown";
            }
            item["answers"].push_back(a);
        }
        doc["data"].push_back(item);
    }
    out << doc.dump(1) << '\n';
}

}  // namespace rcrc
