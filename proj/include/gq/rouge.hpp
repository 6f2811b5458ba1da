#pragma once

#include "gq/text.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gq {

struct PrfScore {
    double precision = 0;
    double recall = 0;
    double f = 0;
};

namespace detail {

inline std::map<std::vector<std::string>, int> ngram_counts(const std::vector<std::string> &tokens, std::size_t n) {
    std::map<std::vector<std::string>, int> counts;
    if (n == 0 || tokens.size() < n)
        return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++counts[std::vector<std::string>(tokens.begin() + static_cast<long>(i), tokens.begin() + static_cast<long>(i + n))];
    return counts;
}

inline std::size_t lcs_length(const std::vector<std::string> &a, const std::vector<std::string> &b) {
    if (a.empty() || b.empty())
        return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace detail

// Clipped n-gram overlap on pre-tokenized input; F is the balanced harmonic mean.
inline PrfScore rouge_n_tokens(const std::vector<std::string> &candidate, const std::vector<std::string> &reference,
                               std::size_t n) {
    auto c = detail::ngram_counts(candidate, n);
    auto r = detail::ngram_counts(reference, n);
    if (c.empty() || r.empty())
        return {};
    double overlap = 0, c_total = 0, r_total = 0;
    for (const auto &[g, k] : c)
        c_total += k;
    for (const auto &[g, k] : r) {
        r_total += k;
        auto it = c.find(g);
        if (it != c.end())
            overlap += std::min(k, it->second);
    }
    PrfScore s;
    s.precision = overlap / c_total;
    s.recall = overlap / r_total;
    s.f = overlap > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

// LCS-based F with recall weight beta: F = (1 + b^2) P R / (R + b^2 P).
inline PrfScore rouge_l_tokens(const std::vector<std::string> &candidate, const std::vector<std::string> &reference,
                               double beta = 1.2) {
    if (candidate.empty() || reference.empty())
        return {};
    double lcs = static_cast<double>(detail::lcs_length(candidate, reference));
    if (lcs == 0)
        return {};
    PrfScore s;
    s.precision = lcs / static_cast<double>(candidate.size());
    s.recall = lcs / static_cast<double>(reference.size());
    double b2 = beta * beta;
    s.f = (1 + b2) * s.precision * s.recall / (s.recall + b2 * s.precision);
    return s;
}

inline double rouge_l(std::string_view candidate, std::string_view reference, double beta = 1.2) {
    return rouge_l_tokens(text::metric_tokens(candidate), text::metric_tokens(reference), beta).f;
}

} // namespace gq
