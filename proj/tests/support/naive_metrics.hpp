#pragma once

// Straight-line reference for answer scoring, written independently of the
// library: std::regex for articles, quadratic matching for token overlap.
// ASCII inputs only.

#include <cctype>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace rcrc::testing {

inline std::string naive_normalize(const std::string& s) {
    static const std::string kPunct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    std::string no_punct;
    for (char c : lower) {
        if (kPunct.find(c) == std::string::npos) no_punct.push_back(c);
    }
    static const std::regex kArticles(R"(\b(a|an|the)\b)");
    const std::string spaced = std::regex_replace(no_punct, kArticles, " ");
    std::istringstream words(spaced);
    std::string w, out;
    while (words >> w) out += (out.empty() ? "" : " ") + w;
    return out;
}

inline std::vector<std::string> naive_tokens(const std::optional<std::string>& s) {
    std::vector<std::string> out;
    if (!s) return out;
    std::istringstream in(naive_normalize(*s));
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline bool naive_is_no_answer(const std::optional<std::string>& s) {
    if (!s) return true;
    std::string t = *s;
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    std::size_t b = 0;
    while (b < t.size() && std::isspace(static_cast<unsigned char>(t[b]))) ++b;
    t = t.substr(b);
    return t.empty() || t == "NO ANSWER";
}

inline int naive_em(const std::optional<std::string>& pred, const std::optional<std::string>& gold) {
    if (naive_is_no_answer(gold)) return naive_is_no_answer(pred) ? 1 : 0;
    const std::string p = naive_is_no_answer(pred) ? "" : naive_normalize(*pred);
    return p == naive_normalize(*gold) ? 1 : 0;
}

inline double naive_f1(const std::optional<std::string>& pred, const std::optional<std::string>& gold) {
    const auto p = naive_is_no_answer(pred) ? std::vector<std::string>{} : naive_tokens(pred);
    const auto g = naive_is_no_answer(gold) ? std::vector<std::string>{} : naive_tokens(gold);
    if (p.empty() && g.empty()) return 1.0;
    if (p.empty() || g.empty()) return 0.0;
    std::vector<bool> used(g.size(), false);
    int common = 0;
    for (const auto& t : p) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (!used[j] && g[j] == t) {
                used[j] = true;
                ++common;
                break;
            }
        }
    }
    if (common == 0) return 0.0;
    const double precision = double(common) / double(p.size());
    const double recall = double(common) / double(g.size());
    return 2 * precision * recall / (precision + recall);
}

}  // namespace rcrc::testing
