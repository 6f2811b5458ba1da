#pragma once

#include "gq/error.hpp"
#include "gq/text.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gq {

struct KeywordResult {
    std::vector<std::string> keywords;
    std::vector<double> scores;
    std::vector<std::string> warnings;
};

// Smoothed inverse document frequency over a sentence collection:
// idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class IdfTable {
  public:
    explicit IdfTable(const std::vector<std::string> &collection) : n_(static_cast<double>(collection.size())) {
        for (const auto &s : collection) {
            std::unordered_set<std::string> seen;
            for (auto &t : text::lower_word_tokens(s))
                if (seen.insert(t).second)
                    ++df_[t];
        }
    }

    double operator()(const std::string &lower_term) const {
        auto it = df_.find(lower_term);
        double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
        return std::log((1.0 + n_) / (1.0 + df)) + 1.0;
    }

  private:
    double n_;
    std::unordered_map<std::string, int> df_;
};

// Top-k content words of the evidence, scored tf * idf with the document's
// sentences as the collection. Ordered by descending score, then first
// occurrence; each keyword keeps the casing of its first occurrence.
inline KeywordResult extract_answer_keywords(const std::vector<std::string> &evidence,
                                             const std::vector<std::string> &collection, std::size_t k = 8) {
    if (evidence.empty())
        throw ValidationError("extract_answer_keywords: evidence is empty");
    IdfTable idf(collection);
    struct Candidate {
        std::string surface;
        std::size_t first = 0;
        int tf = 0;
    };
    std::vector<Candidate> order;
    std::unordered_map<std::string, std::size_t> slot;
    std::size_t position = 0;
    for (const auto &sentence : evidence) {
        for (const auto &tok : text::word_tokens(sentence)) {
            auto key = text::lowercase(tok);
            ++position;
            if (text::is_stopword(key))
                continue;
            auto [it, inserted] = slot.try_emplace(key, order.size());
            if (inserted)
                order.push_back({tok, position, 0});
            ++order[it->second].tf;
        }
    }
    KeywordResult result;
    if (order.empty()) {
        result.warnings.push_back("evidence contains only stopwords; no keywords extracted");
        return result;
    }
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < order.size(); ++i)
        ranked.emplace_back(order[i].tf * idf(text::lowercase(order[i].surface)), i);
    std::stable_sort(ranked.begin(), ranked.end(), [&](const auto &a, const auto &b) {
        if (a.first != b.first)
            return a.first > b.first;
        return order[a.second].first < order[b.second].first;
    });
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        result.keywords.push_back(order[ranked[i].second].surface);
        result.scores.push_back(ranked[i].first);
    }
    return result;
}

} // namespace gq
