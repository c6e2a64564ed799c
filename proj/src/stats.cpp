#include "rcrc/stats.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "json.hpp"

namespace rcrc {

double StatsTable::pct_no_answer() const {
    if (n_questions == 0) return 0.0;
    const double pct = 100.0 * static_cast<double>(n_no_answer) / static_cast<double>(n_questions);
    return std::round(pct * 10.0) / 10.0;
}

void StatsTable::merge(const StatsTable& other) {
    review_ids.insert(other.review_ids.begin(), other.review_ids.end());
    n_dialogues += other.n_dialogues;
    n_dialogues_3plus += other.n_dialogues_3plus;
    n_questions += other.n_questions;
    n_no_answer += other.n_no_answer;
}

StatsTable compute_stats(std::span<const Dialogue> dialogues) {
    StatsTable t;
    for (const auto& d : dialogues) {
        t.review_ids.insert(d.review_id);
        ++t.n_dialogues;
        if (d.turns.size() >= 3) ++t.n_dialogues_3plus;
        t.n_questions += d.turns.size();
        for (const auto& turn : d.turns) {
            if (turn.is_no_answer()) ++t.n_no_answer;
        }
    }
    return t;
}

void write_stats_json(std::ostream& out,
                      std::span<const std::pair<std::string, StatsTable>> named) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& [name, t] : named) {
        nlohmann::ordered_json row;
        row["name"] = name;
        row["n_reviews"] = t.n_reviews();
        row["n_dialogues"] = t.n_dialogues;
        row["n_dialogues_3plus_turns"] = t.n_dialogues_3plus;
        row["n_questions"] = t.n_questions;
        row["n_no_answer"] = t.n_no_answer;
        row["pct_no_answer"] = t.pct_no_answer();
        row["counts"] = "loaded after validation";
        doc.push_back(row);
    }
    out << doc.dump(2) << '\n';
}

void write_stats_table(std::ostream& out,
                       std::span<const std::pair<std::string, StatsTable>> named) {
    std::vector<std::vector<std::string>> rows = {
        {""}, {"# of reviews"}, {"# of dialogues"}, {"# of dialog w/ 3+ turns"},
        {"# of questions"}, {"% of no answers"}};
    for (const auto& [name, t] : named) {
        char pct[32];
        std::snprintf(pct, sizeof pct, "%.1f%%", t.pct_no_answer());
        rows[0].push_back(name);
        rows[1].push_back(std::to_string(t.n_reviews()));
        rows[2].push_back(std::to_string(t.n_dialogues));
        rows[3].push_back(std::to_string(t.n_dialogues_3plus));
        rows[4].push_back(std::to_string(t.n_questions));
        rows[5].push_back(pct);
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c > 0) out << " | ";
            out << r[c] << std::string(width[c] - r[c].size(), ' ');
        }
        out << '\n';
    }
}

}  // namespace rcrc
