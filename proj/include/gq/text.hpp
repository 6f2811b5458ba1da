#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gq::text {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// ASCII punctuation only; bytes >= 0x80 (UTF-8 continuation) count as word characters.
inline bool is_punct(char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u) != 0;
}

inline char to_lower(char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
}

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), to_lower);
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (to_lower(s[i]) != to_lower(prefix[i]))
            return false;
    return true;
}

// Collapse every whitespace run to one space and trim the ends.
inline std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i]))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j]))
            ++j;
        if (j > i)
            out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find('\n', start);
        if (end == std::string_view::npos)
            end = s.size();
        auto line = s.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        out.emplace_back(line);
        start = end + 1;
    }
    return out;
}

template <typename Range>
std::string join(const Range &parts, std::string_view sep) {
    std::string out;
    bool first = true;
    for (const auto &p : parts) {
        if (!first)
            out.append(sep);
        out.append(p);
        first = false;
    }
    return out;
}

inline std::size_t word_count(std::string_view s) { return split_whitespace(s).size(); }

// Metric tokenization: lowercase, split on whitespace, and emit every ASCII
// punctuation character as its own token.
inline std::vector<std::string> metric_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    };
    for (char c : s) {
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            out.emplace_back(1, c);
        } else {
            cur.push_back(to_lower(c));
        }
    }
    flush();
    return out;
}

// Word tokenization for lexical retrieval: runs of non-space, non-punctuation
// characters. Casing is preserved; callers lowercase when they need keys.
inline std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_space(c) || is_punct(c)) {
            if (!cur.empty())
                out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

inline std::vector<std::string> lower_word_tokens(std::string_view s) {
    auto toks = word_tokens(s);
    for (auto &t : toks)
        t = lowercase(t);
    return toks;
}

inline const std::unordered_set<std::string> &stopwords() {
    static const std::unordered_set<std::string> words = {
        "a",       "about",  "above",   "after",   "again",   "against", "all",     "also",
        "am",      "an",     "and",     "any",     "are",     "as",      "at",      "be",
        "because", "been",   "before",  "being",   "below",   "between", "both",    "but",
        "by",      "can",    "could",   "did",     "do",      "does",    "doing",   "down",
        "during",  "each",   "few",     "for",     "from",    "further", "had",     "has",
        "have",    "having", "he",      "her",     "here",    "hers",    "herself", "him",
        "himself", "his",    "how",     "i",       "if",      "in",      "into",    "is",
        "it",      "its",    "itself",  "just",    "may",     "me",      "might",   "more",
        "most",    "must",   "my",      "myself",  "no",      "nor",     "not",     "now",
        "of",      "off",    "on",      "once",    "only",    "or",      "other",   "our",
        "ours",    "out",    "over",    "own",     "same",    "she",     "should",  "so",
        "some",    "such",   "than",    "that",    "the",     "their",   "theirs",  "them",
        "then",    "there",  "these",   "they",    "this",    "those",   "through", "to",
        "too",     "under",  "until",   "up",      "us",      "very",    "was",     "we",
        "were",    "what",   "when",    "where",   "which",   "while",   "who",     "whom",
        "why",     "will",   "with",    "would",   "you",     "your",    "yours",   "yourself",
        "s",       "t",      "don",     "many",    "much",    "within",  "without", "yet",
    };
    return words;
}

inline bool is_stopword(std::string_view lower_word) {
    return stopwords().count(std::string(lower_word)) != 0;
}

} // namespace gq::text
