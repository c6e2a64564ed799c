#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "rcrc/corpus.hpp"

namespace rcrc {

// Dataset statistics for one split of one domain. Partial tables over
// disjoint dialogue sets merge associatively.
struct StatsTable {
    std::set<std::string> review_ids;
    std::size_t n_dialogues = 0;
    std::size_t n_dialogues_3plus = 0;
    std::size_t n_questions = 0;
    std::size_t n_no_answer = 0;

    std::size_t n_reviews() const { return review_ids.size(); }
    // Percentage rounded to one decimal.
    double pct_no_answer() const;

    void merge(const StatsTable& other);

    friend bool operator==(const StatsTable&, const StatsTable&) = default;
};

StatsTable compute_stats(std::span<const Dialogue> dialogues);

void write_stats_json(std::ostream& out,
                      std::span<const std::pair<std::string, StatsTable>> named);

// Rows are the statistics, one column per named table.
void write_stats_table(std::ostream& out,
                       std::span<const std::pair<std::string, StatsTable>> named);

}  // namespace rcrc
