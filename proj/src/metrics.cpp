#include "rcrc/metrics.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "rcrc/error.hpp"
#include "rcrc/utf8.hpp"

namespace rcrc {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
               (cp >= 'A' && cp <= 'Z') || cp == '_';
    }
    return !utf8::is_space(cp) && !utf8::is_punct(cp);
}

bool is_article(std::u32string_view w) { return w == U"a" || w == U"an" || w == U"the"; }

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t cp : utf8::decode(s).code_points) {
        if (utf8::is_space(cp)) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            utf8::append(cur, cp);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool no_answer(Answer a) { return !a || is_no_answer_prediction(*a); }

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * x);
    return buf;
}

using TurnKey = std::pair<std::string, int>;

std::map<TurnKey, std::size_t> index_predictions(std::span<const Prediction> preds) {
    std::map<TurnKey, std::size_t> index;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!index.emplace(TurnKey{preds[i].dialogue_id, preds[i].turn_id}, i).second) {
            throw DataError("duplicate prediction for dialogue " + preds[i].dialogue_id +
                            " turn " + std::to_string(preds[i].turn_id));
        }
    }
    return index;
}

struct GoldRef {
    const Dialogue* dialogue = nullptr;
    const Turn* turn = nullptr;
};

std::vector<GoldRef> flatten(std::span<const Dialogue> golds) {
    std::vector<GoldRef> out;
    for (const auto& d : golds) {
        for (const auto& t : d.turns) out.push_back({&d, &t});
    }
    return out;
}

TurnScore score_one(const GoldRef& g, std::span<const Prediction> preds,
                    const std::map<TurnKey, std::size_t>& index) {
    TurnScore row;
    row.dialogue_id = g.dialogue->dialogue_id;
    row.turn_id = g.turn->turn_id;
    row.gold_no_answer = g.turn->is_no_answer();
    auto it = index.find({row.dialogue_id, row.turn_id});
    if (it == index.end()) {
        row.pred_missing = true;
        return row;
    }
    const std::string& text = preds[it->second].answer_text;
    row.pred_no_answer = is_no_answer_prediction(text);
    Answer gold = row.gold_no_answer ? Answer{} : Answer{g.turn->gold_answer_text};
    row.em = exact_match(text, gold);
    row.f1 = token_f1(text, gold);
    return row;
}

}  // namespace

bool is_no_answer_prediction(std::string_view text) {
    const std::string_view t = utf8::trim(text);
    return t.empty() || t == "NO ANSWER";
}

std::string normalize_answer(std::string_view text) {
    // lowercase, then drop punctuation
    std::u32string s;
    for (char32_t cp : utf8::decode(text).code_points) {
        const bool ascii_punct = cp < 0x80 && utf8::is_punct(cp);
        if (!ascii_punct) s.push_back(utf8::to_lower(cp));
    }
    // articles become a space
    std::u32string no_articles;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_word_char(s[i])) {
            no_articles.push_back(s[i++]);
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && is_word_char(s[j])) ++j;
        const std::u32string_view word(s.data() + i, j - i);
        if (is_article(word)) {
            no_articles.push_back(U' ');
        } else {
            no_articles.append(word);
        }
        i = j;
    }
    std::string out;
    for (char32_t cp : no_articles) utf8::append(out, cp);
    return utf8::collapse_whitespace(out);
}

int exact_match(Answer pred, Answer gold) {
    if (no_answer(gold)) return no_answer(pred) ? 1 : 0;
    const std::string p = no_answer(pred) ? std::string() : normalize_answer(*pred);
    return p == normalize_answer(*gold) ? 1 : 0;
}

double token_f1(Answer pred, Answer gold) {
    const auto p = no_answer(pred) ? std::vector<std::string>{} : split_ws(normalize_answer(*pred));
    const auto g = no_answer(gold) ? std::vector<std::string>{} : split_ws(normalize_answer(*gold));
    if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;

    std::unordered_map<std::string, long> counts;
    for (const auto& t : g) ++counts[t];
    long same = 0;
    for (const auto& t : p) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++same;
        }
    }
    if (same == 0) return 0.0;
    const double precision = static_cast<double>(same) / static_cast<double>(p.size());
    const double recall = static_cast<double>(same) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::vector<Prediction> read_predictions(std::istream& in) {
    std::vector<Prediction> preds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (utf8::trim(line).empty()) continue;
        const std::string where = "predictions line " + std::to_string(line_no);
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": invalid JSON: " + e.what());
        }
        if (!rec.is_object() || !rec.contains("dialogue_id") || !rec["dialogue_id"].is_string() ||
            !rec.contains("turn_id") || !rec["turn_id"].is_number_integer()) {
            throw DataError(where + ": needs string dialogue_id and integer turn_id");
        }
        Prediction p;
        p.dialogue_id = rec["dialogue_id"].get<std::string>();
        p.turn_id = rec["turn_id"].get<int>();
        if (rec.contains("answer_text") && rec["answer_text"].is_string()) {
            p.answer_text = rec["answer_text"].get<std::string>();
        } else if (rec.contains("answer_text") && !rec["answer_text"].is_null()) {
            throw DataError(where + ": answer_text must be a string or null");
        }
        preds.push_back(std::move(p));
    }
    return preds;
}

std::vector<TurnScore> score_turns_serial(std::span<const Dialogue> golds,
                                          std::span<const Prediction> preds) {
    const auto index = index_predictions(preds);
    std::vector<TurnScore> rows;
    for (const GoldRef& g : flatten(golds)) rows.push_back(score_one(g, preds, index));
    return rows;
}

std::vector<TurnScore> score_turns(std::span<const Dialogue> golds,
                                   std::span<const Prediction> preds) {
    const auto index = index_predictions(preds);
    const std::vector<GoldRef> refs = flatten(golds);
    std::vector<TurnScore> rows(refs.size());
    const auto n = static_cast<std::ptrdiff_t>(refs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        rows[k] = score_one(refs[k], preds, index);
    }
    return rows;
}

EvalReport evaluate(std::span<const Dialogue> golds, std::span<const Prediction> preds) {
    EvalReport report;
    report.rows = score_turns(golds, preds);
    report.turns = report.rows.size();
    double em = 0.0;
    double f1 = 0.0;
    for (const auto& r : report.rows) {
        em += r.em;
        f1 += r.f1;
        if (r.pred_missing) ++report.missing_predictions;
        if (r.gold_no_answer) ++report.gold_no_answer;
        if (!r.pred_missing && r.pred_no_answer) ++report.pred_no_answer;
    }
    if (report.turns > 0) {
        report.em = em / static_cast<double>(report.turns);
        report.f1 = f1 / static_cast<double>(report.turns);
    }
    report.unmatched_predictions = preds.size() - (report.turns - report.missing_predictions);
    return report;
}

void write_report_json(std::ostream& out, const EvalReport& report, bool include_rows) {
    ordered_json doc;
    doc["em"] = report.em;
    doc["f1"] = report.f1;
    doc["turns"] = report.turns;
    doc["missing_predictions"] = report.missing_predictions;
    doc["unmatched_predictions"] = report.unmatched_predictions;
    doc["gold_no_answer"] = report.gold_no_answer;
    doc["pred_no_answer"] = report.pred_no_answer;
    doc["scoring"] = "single-reference";
    if (include_rows) {
        doc["rows"] = ordered_json::array();
        for (const auto& r : report.rows) {
            ordered_json row;
            row["dialogue_id"] = r.dialogue_id;
            row["turn_id"] = r.turn_id;
            row["em"] = r.em;
            row["f1"] = r.f1;
            row["gold_no_answer"] = r.gold_no_answer;
            row["pred_missing"] = r.pred_missing;
            doc["rows"].push_back(row);
        }
    }
    out << doc.dump(2) << '\n';
}

void write_domain_table(std::ostream& out,
                        std::span<const std::pair<std::string, EvalReport>> domains) {
    std::string header = "| Domain |";
    std::string metrics = "| Metric |";
    std::string scores = "| Score  |";
    for (const auto& [name, r] : domains) {
        const std::string em = percent(r.em);
        const std::string f1 = percent(r.f1);
        std::string cell = " " + name;
        const std::size_t width = em.size() + f1.size() + 5;
        if (cell.size() < width) cell.append(width - cell.size(), ' ');
        header += cell + " |";
        metrics += " EM" + std::string(em.size() - 1, ' ') + "F1" +
                   std::string(f1.size() + 2, ' ') + "|";
        scores += " " + em + "  " + f1 + "  |";
    }
    out << header << '\n' << metrics << '\n' << scores << '\n';
}

}  // namespace rcrc
