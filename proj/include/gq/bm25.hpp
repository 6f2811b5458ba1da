#pragma once

#include "gq/text.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gq {

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

// Okapi BM25 over a small in-memory collection (the sentences of one document).
// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which stays positive for terms
// present in every sentence.
class Bm25Index {
  public:
    explicit Bm25Index(const std::vector<std::string> &passages, Bm25Params params = {})
        : params_(params) {
        term_freqs_.reserve(passages.size());
        double total_len = 0;
        for (const auto &p : passages) {
            std::unordered_map<std::string, int> tf;
            auto toks = text::lower_word_tokens(p);
            for (const auto &t : toks)
                ++tf[t];
            for (const auto &[term, count] : tf)
                ++doc_freq_[term];
            lengths_.push_back(static_cast<double>(toks.size()));
            total_len += static_cast<double>(toks.size());
            term_freqs_.push_back(std::move(tf));
        }
        avg_len_ = passages.empty() ? 0.0 : total_len / static_cast<double>(passages.size());
    }

    std::size_t size() const { return term_freqs_.size(); }

    double idf(const std::string &term) const {
        auto it = doc_freq_.find(term);
        double df = it == doc_freq_.end() ? 0.0 : static_cast<double>(it->second);
        double n = static_cast<double>(term_freqs_.size());
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    // Query terms are counted once per occurrence.
    double score(std::string_view query, std::size_t passage) const {
        const auto &tf = term_freqs_.at(passage);
        double norm = params_.k1 * (1.0 - params_.b + params_.b * (avg_len_ > 0 ? lengths_[passage] / avg_len_ : 0.0));
        double s = 0;
        for (const auto &term : text::lower_word_tokens(query)) {
            auto it = tf.find(term);
            if (it == tf.end())
                continue;
            double f = it->second;
            s += idf(term) * f * (params_.k1 + 1.0) / (f + norm);
        }
        return s;
    }

    // Index of the highest-scoring passage; ties resolve to the lowest index.
    std::size_t best(std::string_view query) const {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = score(query, i);
            if (s > top) {
                top = s;
                arg = i;
            }
        }
        return arg;
    }

  private:
    Bm25Params params_;
    std::vector<std::unordered_map<std::string, int>> term_freqs_;
    std::vector<double> lengths_;
    std::unordered_map<std::string, int> doc_freq_;
    double avg_len_ = 0;
};

} // namespace gq
