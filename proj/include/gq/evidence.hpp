#pragma once

// Supporting-sentence extraction: greedy Rouge-oracle search plus an
// exhaustive reference search used to check it.

#include "gq/corpus.hpp"
#include "gq/rouge.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gq {

enum class EvidenceObjective {
    Rouge12Mean, // mean of Rouge-1 F and Rouge-2 F
    RougeL,
};

struct EvidenceOptions {
    int max_sentences = 5;
    EvidenceObjective objective = EvidenceObjective::Rouge12Mean;
    std::set<int> excluded; // sentence indices never selected (e.g. the questions themselves)
};

struct EvidenceResult {
    std::vector<int> indices; // sorted, 1-based
    double score = 0;
    std::vector<std::pair<int, double>> trace; // (added index, objective after adding it)
};

class EvidenceScorer {
  public:
    EvidenceScorer(std::string_view answer, const Document &doc, EvidenceObjective objective)
        : answer_(text::metric_tokens(answer)), objective_(objective) {
        sentences_.reserve(doc.size());
        for (const auto &s : doc.sentences)
            sentences_.push_back(text::metric_tokens(s));
    }

    // Objective for the selected indices, concatenated in index order.
    double operator()(const std::vector<int> &sorted_indices) const {
        std::vector<std::string> cand;
        for (int i : sorted_indices) {
            const auto &s = sentences_.at(static_cast<std::size_t>(i - 1));
            cand.insert(cand.end(), s.begin(), s.end());
        }
        if (objective_ == EvidenceObjective::RougeL)
            return rouge_l_tokens(cand, answer_, 1.0).f;
        return 0.5 * (rouge_n_tokens(cand, answer_, 1).f + rouge_n_tokens(cand, answer_, 2).f);
    }

  private:
    std::vector<std::string> answer_;
    std::vector<std::vector<std::string>> sentences_;
    EvidenceObjective objective_;
};

namespace detail {

inline void require_answer(std::string_view answer, const Document &doc) {
    if (answer == kNoAnswer)
        throw ValidationError("evidence extraction called with NO ANSWER; emit NO EVIDENCE instead");
    if (doc.sentences.empty())
        throw ValidationError("evidence extraction on an empty document");
}

inline constexpr double kImprovementEps = 1e-12;

} // namespace detail

// Starts from the empty set and repeatedly adds the sentence with the largest
// objective gain, lowest index on ties, until no sentence improves the
// objective or max_sentences is reached.
inline EvidenceResult extract_evidence(std::string_view answer, const Document &doc, const EvidenceOptions &opts = {}) {
    detail::require_answer(answer, doc);
    EvidenceScorer scorer(answer, doc, opts.objective);
    EvidenceResult result;
    std::set<int> chosen;
    const int n = static_cast<int>(doc.size());
    while (static_cast<int>(chosen.size()) < opts.max_sentences) {
        int best_index = 0;
        double best_score = result.score;
        for (int i = 1; i <= n; ++i) {
            if (chosen.count(i) || opts.excluded.count(i))
                continue;
            std::set<int> trial = chosen;
            trial.insert(i);
            double s = scorer(std::vector<int>(trial.begin(), trial.end()));
            if (s > best_score + detail::kImprovementEps) {
                best_score = s;
                best_index = i;
            }
        }
        if (best_index == 0)
            break;
        chosen.insert(best_index);
        result.score = best_score;
        result.trace.emplace_back(best_index, best_score);
    }
    result.indices.assign(chosen.begin(), chosen.end());
    return result;
}

inline constexpr int kBruteForceMaxSentences = 12;

// Exhaustive search over every subset of size <= max_sentences. Ties go to the
// lexicographically smallest index set.
inline EvidenceResult brute_force_evidence(std::string_view answer, const Document &doc,
                                           const EvidenceOptions &opts = {}) {
    detail::require_answer(answer, doc);
    const int n = static_cast<int>(doc.size());
    if (n > kBruteForceMaxSentences)
        throw ValidationError("brute_force_evidence: document has " + std::to_string(n) + " sentences (limit " +
                              std::to_string(kBruteForceMaxSentences) + ")");
    EvidenceScorer scorer(answer, doc, opts.objective);
    EvidenceResult best;
    best.score = 0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> subset;
        bool allowed = true;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                if (opts.excluded.count(i + 1))
                    allowed = false;
                subset.push_back(i + 1);
            }
        }
        if (!allowed || static_cast<int>(subset.size()) > opts.max_sentences)
            continue;
        double s = scorer(subset);
        if (s > best.score + detail::kImprovementEps ||
            (s >= best.score - detail::kImprovementEps && !best.indices.empty() && subset < best.indices)) {
            best.score = s;
            best.indices = subset;
        }
    }
    if (best.score <= 0)
        best.indices.clear();
    return best;
}

} // namespace gq
