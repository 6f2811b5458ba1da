#pragma once

#include "gq/error.hpp"
#include "gq/text.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gq {

// Lowercased tokens (with their trailing period) that never end a sentence.
class AbbreviationList {
  public:
    AbbreviationList() : AbbreviationList(defaults()) {}

    explicit AbbreviationList(const std::vector<std::string> &tokens) {
        for (const auto &t : tokens) {
            auto k = text::lowercase(text::trim(t));
            if (!k.empty())
                tokens_.insert(k);
        }
    }

    // One token per line; blank lines and lines starting with '#' are ignored.
    static AbbreviationList from_file(const std::filesystem::path &path) {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open abbreviation list " + path.string());
        std::vector<std::string> tokens;
        std::string line;
        while (std::getline(in, line)) {
            auto t = text::trim(line);
            if (t.empty() || t.front() == '#')
                continue;
            tokens.emplace_back(t);
        }
        return AbbreviationList(tokens);
    }

    bool contains(std::string_view lower_token) const { return tokens_.count(std::string(lower_token)) != 0; }

    static const std::vector<std::string> &defaults() {
        static const std::vector<std::string> list = {
            "mr.",   "mrs.",  "ms.",   "dr.",    "prof.", "sr.",   "jr.",   "st.",   "vs.",   "etc.",
            "fig.",  "figs.", "eq.",   "eqs.",   "e.g.",  "i.e.",  "cf.",   "al.",   "approx.",
            "no.",   "nos.",  "vol.",  "vols.",  "ch.",   "chap.", "sec.",  "ref.",  "refs.", "tab.",
            "pp.",   "p.",    "inc.",  "ltd.",   "co.",   "corp.", "dept.", "univ.", "ca.",   "viz.",
            "jan.",  "feb.",  "mar.",  "apr.",   "jun.",  "jul.",  "aug.",  "sep.",  "sept.", "oct.",
            "nov.",  "dec.",  "min.",  "max.",   "est.",  "gen.",  "gov.",  "rev.",  "ed.",   "eds.",
        };
        return list;
    }

  private:
    std::unordered_set<std::string> tokens_;
};

namespace detail {

inline bool is_opening(std::string_view tok) {
    if (tok.empty())
        return false;
    char c = tok.front();
    return c == '"' || c == '\'' || c == '(' || c == '[' || tok.substr(0, 3) == "\xE2\x80\x9C" ||
           tok.substr(0, 3) == "\xE2\x80\x98";
}

// Strip trailing closing quotes and brackets.
inline std::string_view strip_closers(std::string_view tok) {
    for (;;) {
        if (tok.empty())
            return tok;
        char c = tok.back();
        if (c == '"' || c == '\'' || c == ')' || c == ']') {
            tok.remove_suffix(1);
            continue;
        }
        if (tok.size() >= 3) {
            auto tail = tok.substr(tok.size() - 3);
            if (tail == "\xE2\x80\x9D" || tail == "\xE2\x80\x99") {
                tok.remove_suffix(3);
                continue;
            }
        }
        return tok;
    }
}

inline bool is_initials(std::string_view core) {
    // "J." or "U.S."
    if (core.size() < 2 || core.size() % 2 != 0)
        return false;
    for (std::size_t i = 0; i < core.size(); i += 2) {
        auto c = static_cast<unsigned char>(core[i]);
        if (!std::isalpha(c) || core[i + 1] != '.')
            return false;
    }
    return true;
}

inline bool may_start_sentence(std::string_view tok) {
    auto c = static_cast<unsigned char>(tok.front());
    if (c >= 0x80)
        return true;
    return std::isupper(c) || std::isdigit(c) || is_opening(tok);
}

// depth_after[i] > 0 iff token i lies inside a balanced quote/bracket span that
// closes in a later token. Unbalanced openers are ignored.
inline std::vector<int> span_depths(const std::vector<std::string> &tokens) {
    struct Event {
        std::size_t token;
        int kind; // 0 straight quote, 1 curly open, 2 curly close, 3 paren open, 4 paren close
    };
    std::vector<Event> events;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto &t = tokens[i];
        for (std::size_t k = 0; k < t.size(); ++k) {
            char c = t[k];
            if (c == '"')
                events.push_back({i, 0});
            else if (c == '(' || c == '[')
                events.push_back({i, 3});
            else if (c == ')' || c == ']')
                events.push_back({i, 4});
            else if (t.compare(k, 3, "\xE2\x80\x9C") == 0)
                events.push_back({i, 1});
            else if (t.compare(k, 3, "\xE2\x80\x9D") == 0)
                events.push_back({i, 2});
        }
    }
    std::vector<int> diff(tokens.size() + 1, 0);
    auto add_span = [&](std::size_t open_tok, std::size_t close_tok) {
        if (close_tok > open_tok) {
            diff[open_tok] += 1;
            diff[close_tok] -= 1;
        }
    };
    std::size_t straight = 0;
    for (const auto &e : events)
        straight += e.kind == 0 ? 1 : 0;
    if (straight % 2 == 0) {
        std::optional<std::size_t> open;
        for (const auto &e : events) {
            if (e.kind != 0)
                continue;
            if (open) {
                add_span(*open, e.token);
                open.reset();
            } else {
                open = e.token;
            }
        }
    }
    for (int open_kind : {1, 3}) {
        std::vector<std::size_t> stack;
        for (const auto &e : events) {
            if (e.kind == open_kind)
                stack.push_back(e.token);
            else if (e.kind == open_kind + 1 && !stack.empty()) {
                add_span(stack.back(), e.token);
                stack.pop_back();
            }
        }
    }
    std::vector<int> depth(tokens.size(), 0);
    int running = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        running += diff[i];
        depth[i] = running;
    }
    return depth;
}

} // namespace detail

// Rule-based splitter: a sentence ends at a token whose last non-closing
// character is '.', '?' or '!', when the next token may start a sentence, the
// token is outside any quote/bracket span, and a '.' token is neither an
// abbreviation nor an initial.
inline std::vector<std::string> segment_sentences(std::string_view input,
                                                  const AbbreviationList &abbreviations = {}) {
    auto tokens = text::split_whitespace(input);
    std::vector<std::string> out;
    if (tokens.empty())
        return out;
    auto depth = detail::span_depths(tokens);

    std::string current;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!current.empty())
            current.push_back(' ');
        current += tokens[i];
        if (i + 1 == tokens.size())
            break;
        auto core = detail::strip_closers(tokens[i]);
        if (core.empty() || depth[i] > 0)
            continue;
        char last = core.back();
        if (last != '.' && last != '?' && last != '!')
            continue;
        if (!detail::may_start_sentence(tokens[i + 1]))
            continue;
        if (last == '.') {
            // Leading openers do not belong to the abbreviation key.
            std::string_view key = core;
            while (!key.empty() && (key.front() == '(' || key.front() == '[' || key.front() == '"'))
                key.remove_prefix(1);
            if (abbreviations.contains(text::lowercase(key)) || detail::is_initials(key))
                continue;
        }
        out.push_back(std::move(current));
        current.clear();
    }
    if (!current.empty())
        out.push_back(std::move(current));
    return out;
}

} // namespace gq
