#pragma once

#include "gq/annotation.hpp"
#include "gq/corpus.hpp"
#include "gq/keywords.hpp"
#include "gq/segment.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace gq {

inline constexpr int kRemoved = -1;

struct SmoothedDocument {
    std::string doc_id;
    Domain domain = Domain::Textbook;
    std::string title;
    std::vector<std::string> sentences;
    std::vector<int> index_map;     // original index -> smoothed index or kRemoved; [0] maps the title to 0
    std::vector<int> noise_indices; // original indices of noise removals
    std::vector<int> question_indices;

    bool operator==(const SmoothedDocument &) const = default;

    const std::string &sentence(int index) const {
        return index == 0 ? title : sentences.at(static_cast<std::size_t>(index - 1));
    }
};

struct PrepareOptions {
    double noise_rate = 0.01;
    std::uint64_t seed = 13;
    int exclusion_distance = 10; // noise never lands closer than this to a question or another removal
    AnnotationOptions annotation;
};

struct PreparedDocument {
    SmoothedDocument smoothed;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Noise selection: ceil(rate * n) non-question sentences, drawn one at a time
// from those at distance >= `distance` from every question and prior pick.
inline std::vector<int> select_noise(int n, const std::set<int> &questions, double rate, int distance,
                                     std::uint64_t seed, std::vector<std::string> &warnings) {
    const int wanted = static_cast<int>(std::ceil(rate * n - 1e-9));
    std::mt19937_64 rng(seed);
    std::set<int> blocked = questions;
    std::vector<int> picks;
    for (int k = 0; k < wanted; ++k) {
        std::vector<int> eligible;
        for (int i = 1; i <= n; ++i) {
            bool ok = true;
            for (int b : blocked)
                if (std::abs(i - b) < distance) {
                    ok = false;
                    break;
                }
            if (ok)
                eligible.push_back(i);
        }
        if (eligible.empty()) {
            warnings.push_back("only " + std::to_string(picks.size()) + " of " + std::to_string(wanted) +
                               " noise sentences could be placed (exclusion distance " + std::to_string(distance) + ")");
            break;
        }
        int pick = eligible[static_cast<std::size_t>(rng() % eligible.size())];
        picks.push_back(pick);
        blocked.insert(pick);
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

} // namespace detail

// Removes every question sentence plus noise sentences, smoothing each gap
// (a run of consecutive removals forms one gap) through the backend. Gaps are
// processed in document order on the already-edited text. An edit that
// changes the number of window sentences is discarded with a warning, leaving
// a plain deletion, so index_map stays exact.
inline PreparedDocument prepare_document(const AnnotatedDocument &doc, TextGenerator &backend,
                                         const PrepareOptions &opts = {}) {
    PreparedDocument out;
    const auto &d = doc.document;
    const int n = static_cast<int>(d.size());
    std::set<int> questions;
    for (const auto &q : doc.questions)
        if (q.position > 0)
            questions.insert(q.position);

    auto noise = detail::select_noise(n, questions, opts.noise_rate, opts.exclusion_distance,
                                      opts.seed ^ detail::fnv1a64(d.doc_id), out.warnings);
    std::set<int> removed = questions;
    removed.insert(noise.begin(), noise.end());

    auto &s = out.smoothed;
    s.doc_id = d.doc_id;
    s.domain = d.domain;
    s.title = d.title;
    s.noise_indices = noise;
    s.question_indices.assign(questions.begin(), questions.end());
    s.index_map.assign(static_cast<std::size_t>(n + 1), kRemoved);
    s.index_map[0] = 0;
    for (int i = 1; i <= n; ++i) {
        if (removed.count(i))
            continue;
        s.sentences.push_back(d.sentence(static_cast<std::size_t>(i)));
        s.index_map[static_cast<std::size_t>(i)] = static_cast<int>(s.sentences.size());
    }

    const int radius = opts.annotation.smoothing_radius;
    int i = 1;
    while (i <= n) {
        if (!removed.count(i)) {
            ++i;
            continue;
        }
        std::vector<std::string> gap_text;
        int j = i;
        while (j <= n && removed.count(j))
            gap_text.push_back(d.sentence(static_cast<std::size_t>(j++)));
        // Retained sentences before the gap in the smoothed document.
        int gap_after = 0;
        for (int k = i - 1; k >= 1; --k)
            if (s.index_map[static_cast<std::size_t>(k)] != kRemoved) {
                gap_after = s.index_map[static_cast<std::size_t>(k)];
                break;
            }
        const int m = static_cast<int>(s.sentences.size());
        const int lo = std::max(1, gap_after - radius + 1);
        const int hi = std::min(m, gap_after + radius);
        std::vector<std::string> before, after;
        for (int k = lo; k <= gap_after; ++k)
            before.push_back(s.sentences[static_cast<std::size_t>(k - 1)]);
        for (int k = gap_after + 1; k <= hi; ++k)
            after.push_back(s.sentences[static_cast<std::size_t>(k - 1)]);
        if (!before.empty() || !after.empty()) {
            auto result = smooth_gap(before, after, gap_text, backend, opts.annotation);
            auto edited = segment_sentences(result.paragraph);
            if (edited.size() == before.size() + after.size()) {
                for (std::size_t k = 0; k < edited.size(); ++k)
                    s.sentences[static_cast<std::size_t>(lo - 1) + k] = edited[k];
            } else {
                out.warnings.push_back("gap at original sentence " + std::to_string(i) +
                                       ": smoothing changed the sentence count (" +
                                       std::to_string(before.size() + after.size()) + " -> " +
                                       std::to_string(edited.size()) + "); kept plain deletion");
            }
        }
        i = j;
    }
    return out;
}

// Question sentences dropped without smoothing or noise.
inline SmoothedDocument remove_questions(const AnnotatedDocument &doc) {
    SmoothedDocument s;
    const auto &d = doc.document;
    s.doc_id = d.doc_id;
    s.domain = d.domain;
    s.title = d.title;
    std::set<int> qs;
    for (const auto &q : doc.questions)
        if (q.position > 0)
            qs.insert(q.position);
    s.question_indices.assign(qs.begin(), qs.end());
    s.index_map.assign(d.size() + 1, kRemoved);
    s.index_map[0] = 0;
    for (std::size_t i = 1; i <= d.size(); ++i) {
        if (qs.count(static_cast<int>(i)))
            continue;
        s.sentences.push_back(d.sentence(i));
        s.index_map[i] = static_cast<int>(s.sentences.size());
    }
    return s;
}

inline Document as_document(const SmoothedDocument &s) {
    Document d;
    d.doc_id = s.doc_id;
    d.domain = s.domain;
    d.title = s.title;
    d.sentences = s.sentences;
    return d;
}

inline Json to_json(const SmoothedDocument &s) {
    Json j;
    j["doc_id"] = s.doc_id;
    j["domain"] = to_string(s.domain);
    j["title"] = s.title;
    j["sentences"] = s.sentences;
    j["index_map"] = s.index_map;
    j["noise_indices"] = s.noise_indices;
    j["question_indices"] = s.question_indices;
    return j;
}

inline SmoothedDocument smoothed_from_json(const Json &j, const std::string &where) {
    auto d = document_from_json(j, where);
    SmoothedDocument s;
    s.doc_id = d.doc_id;
    s.domain = d.domain;
    s.title = d.title;
    s.sentences = d.sentences;
    s.index_map = detail::require_field<std::vector<int>>(j, "index_map", where);
    s.noise_indices = j.value("noise_indices", std::vector<int>{});
    s.question_indices = j.value("question_indices", std::vector<int>{});
    if (s.index_map.empty() || s.index_map[0] != 0)
        throw ValidationError(where + ": index_map must start with 0 for the title");
    for (int v : s.index_map)
        if (v != kRemoved && (v < 0 || v > static_cast<int>(s.sentences.size())))
            throw ValidationError(where + ": index_map entry " + std::to_string(v) + " out of range");
    return s;
}

// ---------------------------------------------------------------------------
// Joint template

struct JointEntry {
    std::string anchor_sentence;
    std::optional<QuestionRole> role;
    std::vector<std::string> answer_keywords;
    std::string question;

    bool operator==(const JointEntry &) const = default;
};

// Backslash-escapes the delimiter characters of the joint template.
inline std::string escape_joint_payload(std::string_view s, bool escape_comma = false) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\\' || c == '#' || c == '|' || (escape_comma && c == ','))
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

inline std::string unescape_joint_payload(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size())
            ++i;
        out.push_back(s[i]);
    }
    return out;
}

struct RawPiece {
    std::string text;
    std::size_t offset = 0;
};

// Splits on unescaped `sep`; pieces keep their escapes.
inline std::vector<RawPiece> split_unescaped(std::string_view s, char sep, std::size_t base_offset = 0) {
    std::vector<RawPiece> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\') {
            ++i;
            continue;
        }
        if (s[i] == sep) {
            out.push_back({std::string(s.substr(start, i - start)), base_offset + start});
            start = i + 1;
        }
    }
    out.push_back({std::string(s.substr(start)), base_offset + start});
    return out;
}

inline std::string flatten_joint_entry(const JointEntry &e, bool with_roles) {
    std::vector<std::string> kws;
    for (const auto &k : e.answer_keywords)
        kws.push_back(escape_joint_payload(k, true));
    std::string out = "Position: " + escape_joint_payload(e.anchor_sentence);
    if (with_roles)
        out += " # Role: " + std::string(to_string(*e.role));
    out += " # Answer: " + text::join(kws, ", ");
    out += " # Question: " + escape_joint_payload(e.question);
    return out;
}

inline std::string flatten_joint(const std::vector<JointEntry> &entries, bool with_roles) {
    if (entries.empty())
        throw ValidationError("flatten_joint: no entries");
    std::vector<std::string> records;
    for (const auto &e : entries) {
        if (with_roles && !e.role)
            throw ValidationError("flatten_joint: role missing for question '" + e.question + "'");
        records.push_back(flatten_joint_entry(e, with_roles));
    }
    return text::join(records, " | ");
}

struct JointRecordError {
    std::size_t offset = 0;
    std::string message;
};

struct JointParseOutcome {
    std::vector<JointEntry> entries;
    std::vector<JointRecordError> errors;
};

class JointParseError : public ParseError {
  public:
    JointParseError(const std::string &what, std::string raw, std::vector<JointRecordError> errors)
        : ParseError(what, std::move(raw)), errors_(std::move(errors)) {}

    const std::vector<JointRecordError> &errors() const noexcept { return errors_; }

  private:
    std::vector<JointRecordError> errors_;
};

// Tolerant parse: well-formed records become entries, malformed ones become
// errors carrying their byte offset.
inline JointParseOutcome parse_joint_records(std::string_view input, bool with_roles) {
    JointParseOutcome out;
    for (const auto &rec : split_unescaped(input, '|')) {
        if (text::trim(rec.text).empty())
            continue;
        std::optional<std::string> position, role, answer, question;
        std::optional<std::string> problem;
        for (const auto &field : split_unescaped(rec.text, '#', rec.offset)) {
            auto f = text::trim(field.text);
            auto take = [&](std::string_view label, std::optional<std::string> &slot) {
                if (!text::starts_with_ci(f, label))
                    return false;
                if (slot)
                    problem = "duplicate field '" + std::string(label) + "'";
                slot = std::string(text::trim(f.substr(label.size())));
                return true;
            };
            if (take("Position:", position) || take("Role:", role) || take("Answer:", answer) ||
                take("Question:", question))
                continue;
            problem = "unrecognized field '" + std::string(f.substr(0, 24)) + "'";
        }
        JointEntry e;
        if (!problem) {
            if (!position)
                problem = "missing Position field";
            else if (!answer)
                problem = "missing Answer field";
            else if (!question)
                problem = "missing Question field";
            else if (with_roles && !role)
                problem = "missing Role field";
            else if (!with_roles && role)
                problem = "unexpected Role field";
        }
        if (!problem) {
            e.anchor_sentence = unescape_joint_payload(*position);
            e.question = unescape_joint_payload(*question);
            for (const auto &kw : split_unescaped(*answer, ',')) {
                auto k = unescape_joint_payload(text::trim(kw.text));
                if (!k.empty())
                    e.answer_keywords.push_back(std::move(k));
            }
            if (role) {
                e.role = parse_role_lenient(*role);
                if (!e.role)
                    problem = "unknown role '" + *role + "'";
            }
            if (e.anchor_sentence.empty())
                problem = "empty Position field";
            else if (e.question.empty() || e.question.back() != '?')
                problem = "question does not end with '?'";
        }
        if (problem)
            out.errors.push_back({rec.offset, *problem});
        else
            out.entries.push_back(std::move(e));
    }
    return out;
}

// Strict parse: any malformed record or an empty result is an error.
inline std::vector<JointEntry> parse_joint(std::string_view input, bool with_roles) {
    auto outcome = parse_joint_records(input, with_roles);
    if (!outcome.errors.empty()) {
        const auto &e = outcome.errors.front();
        throw JointParseError("joint parse: record at offset " + std::to_string(e.offset) + ": " + e.message,
                              std::string(input), outcome.errors);
    }
    if (outcome.entries.empty())
        throw JointParseError("joint parse: no records", std::string(input), {});
    return outcome.entries;
}

// ---------------------------------------------------------------------------
// Training examples

enum class TaskKind { PP, AE, QG, Joint, JointR };
enum class Paradigm { PP, AE, QG, Multitask, Joint, JointR };

inline std::string_view to_string(TaskKind t) {
    switch (t) {
    case TaskKind::PP:
        return "PP";
    case TaskKind::AE:
        return "AE";
    case TaskKind::QG:
        return "QG";
    case TaskKind::Joint:
        return "Joint";
    case TaskKind::JointR:
        return "JointR";
    }
    return "";
}

inline std::optional<TaskKind> parse_task_kind(std::string_view s) {
    for (auto t : {TaskKind::PP, TaskKind::AE, TaskKind::QG, TaskKind::Joint, TaskKind::JointR})
        if (to_string(t) == s)
            return t;
    return std::nullopt;
}

inline std::string_view to_string(Paradigm p) {
    switch (p) {
    case Paradigm::PP:
        return "PP";
    case Paradigm::AE:
        return "AE";
    case Paradigm::QG:
        return "QG";
    case Paradigm::Multitask:
        return "Multitask";
    case Paradigm::Joint:
        return "Joint";
    case Paradigm::JointR:
        return "JointR";
    }
    return "";
}

inline std::optional<Paradigm> parse_paradigm(std::string_view s) {
    for (auto p : {Paradigm::PP, Paradigm::AE, Paradigm::QG, Paradigm::Multitask, Paradigm::Joint, Paradigm::JointR})
        if (text::lowercase(to_string(p)) == text::lowercase(s))
            return p;
    return std::nullopt;
}

inline constexpr std::string_view kPrefixPP = "predict positions: ";
inline constexpr std::string_view kPrefixAE = "extract answer: ";
inline constexpr std::string_view kPrefixQG = "generate question: ";
inline constexpr std::string_view kQuestionMarker = "[Question]";
inline constexpr std::string_view kAllQuestions = "ALL";

struct TrainingExample {
    TaskKind task = TaskKind::PP;
    std::string input_text;
    std::string target_text;
    std::string doc_id;
    std::string qid; // kAllQuestions for document-level examples

    bool operator==(const TrainingExample &) const = default;
};

inline Json to_json(const TrainingExample &e) {
    Json j;
    j["task"] = to_string(e.task);
    j["input_text"] = e.input_text;
    j["target_text"] = e.target_text;
    j["doc_id"] = e.doc_id;
    j["qid"] = e.qid;
    return j;
}

inline TrainingExample training_example_from_json(const Json &j, const std::string &where) {
    TrainingExample e;
    auto task = detail::require_field<std::string>(j, "task", where);
    auto parsed = parse_task_kind(task);
    if (!parsed)
        throw ValidationError(where + ": unknown task '" + task + "'");
    e.task = *parsed;
    e.input_text = detail::require_field<std::string>(j, "input_text", where);
    e.target_text = detail::require_field<std::string>(j, "target_text", where);
    e.doc_id = detail::require_field<std::string>(j, "doc_id", where);
    e.qid = detail::require_field<std::string>(j, "qid", where);
    if (e.input_text.empty() || e.target_text.empty())
        throw ValidationError(where + ": input_text and target_text must be non-empty");
    return e;
}

// Renders title and body; `marker_after` >= 0 inserts "[Question]" after that
// sentence (0 = after the title).
inline std::string render_model_input(const std::string &title, const std::vector<std::string> &sentences,
                                      int marker_after = -1) {
    std::string out = title;
    out += "\n";
    if (marker_after == 0)
        out += std::string(kQuestionMarker) + (sentences.empty() ? "" : " ");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i > 0)
            out.push_back(' ');
        out += sentences[i];
        if (static_cast<int>(i + 1) == marker_after)
            out += " " + std::string(kQuestionMarker);
    }
    return out;
}

inline std::string render_model_input(const SmoothedDocument &doc, int marker_after = -1) {
    return render_model_input(doc.title, doc.sentences, marker_after);
}

inline std::string render_model_input(const Document &doc, int marker_after = -1) {
    return render_model_input(doc.title, doc.sentences, marker_after);
}

inline std::string keywords_payload(const std::vector<std::string> &keywords) {
    return keywords.empty() ? std::string(kNoAnswer) : text::join(keywords, ", ");
}

inline std::string qg_input(const std::string &marked_doc, const std::vector<std::string> &keywords) {
    return marked_doc + "\nAnswer: " + keywords_payload(keywords);
}

struct AnchoredQuestion {
    const GuidingQuestion *question = nullptr;
    int smoothed_anchor = 0; // 0 = title
};

// Anchor of a question: the nearest preceding non-question sentence (the title
// when none), mapped into the smoothed document.
inline std::vector<AnchoredQuestion> anchor_questions(const SmoothedDocument &doc,
                                                      const std::vector<GuidingQuestion> &questions,
                                                      bool include_title = false) {
    std::set<int> qpos(doc.question_indices.begin(), doc.question_indices.end());
    std::vector<AnchoredQuestion> out;
    for (const auto &q : questions) {
        if (q.position == 0 && !include_title)
            continue;
        int a = q.position - 1;
        while (a > 0 && qpos.count(a))
            --a;
        if (a < 0)
            a = 0;
        int mapped = doc.index_map.at(static_cast<std::size_t>(a));
        if (mapped == kRemoved)
            throw ValidationError(doc.doc_id + " " + q.qid + ": anchor sentence " + std::to_string(a) +
                                  " was removed as noise");
        out.push_back({&q, mapped});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto &x, const auto &y) { return x.question->position < y.question->position; });
    return out;
}

struct ExampleOptions {
    bool include_title = false;
};

inline std::vector<TrainingExample> make_training_examples(const SmoothedDocument &doc,
                                                           const std::vector<GuidingQuestion> &questions,
                                                           Paradigm paradigm, const ExampleOptions &opts = {}) {
    auto anchored = anchor_questions(doc, questions, opts.include_title);
    std::vector<TrainingExample> out;
    if (anchored.empty())
        return out;
    const auto plain = render_model_input(doc);
    const bool multitask = paradigm == Paradigm::Multitask;
    auto prefixed = [&](std::string_view prefix, std::string s) {
        return multitask ? std::string(prefix) + s : s;
    };

    if (paradigm == Paradigm::PP || multitask) {
        std::vector<std::string> anchors;
        for (const auto &a : anchored)
            anchors.push_back(escape_joint_payload(doc.sentence(a.smoothed_anchor)));
        out.push_back({TaskKind::PP, prefixed(kPrefixPP, plain), text::join(anchors, " | "), doc.doc_id,
                       std::string(kAllQuestions)});
    }
    if (paradigm == Paradigm::AE || multitask)
        for (const auto &a : anchored)
            out.push_back({TaskKind::AE, prefixed(kPrefixAE, render_model_input(doc, a.smoothed_anchor)),
                           keywords_payload(a.question->answer_keywords), doc.doc_id, a.question->qid});
    if (paradigm == Paradigm::QG || multitask)
        for (const auto &a : anchored)
            out.push_back({TaskKind::QG,
                           prefixed(kPrefixQG, qg_input(render_model_input(doc, a.smoothed_anchor),
                                                        a.question->answer_keywords)),
                           a.question->completed_text, doc.doc_id, a.question->qid});
    if (paradigm == Paradigm::Joint || paradigm == Paradigm::JointR) {
        const bool with_roles = paradigm == Paradigm::JointR;
        std::vector<JointEntry> entries;
        for (const auto &a : anchored)
            entries.push_back({doc.sentence(a.smoothed_anchor),
                               with_roles ? std::optional<QuestionRole>(a.question->role) : std::nullopt,
                               a.question->answer_keywords, a.question->completed_text});
        out.push_back({with_roles ? TaskKind::JointR : TaskKind::Joint, plain, flatten_joint(entries, with_roles),
                       doc.doc_id, std::string(kAllQuestions)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Context truncation

struct ContextSegment {
    int first = 0; // inclusive sentence indices; 0 = title
    int last = 0;
    std::size_t tokens = 0;
};

struct TruncationResult {
    int kept_first = 0;
    int kept_last = 0;
    std::vector<ContextSegment> segments;
};

// Keeps [max(0, first_q - 5), min(n, last_q + 5)] and, when that span exceeds
// max_len whitespace tokens, splits it into k equal-count segments (smallest
// feasible k), moving each cut to the nearest position that keeps three
// sentences on both sides of every anchor.
inline TruncationResult truncate_context(const Document &doc, int first_q, int last_q, std::size_t max_len,
                                         std::vector<int> anchors = {}) {
    const int n = static_cast<int>(doc.size());
    if (first_q < 1 || first_q > last_q || last_q > n)
        throw ValidationError("truncate_context: need 1 <= first <= last <= n");
    if (max_len == 0)
        throw ValidationError("truncate_context: max_len must be positive");
    if (anchors.empty())
        anchors = {first_q, last_q};
    TruncationResult r;
    r.kept_first = std::max(0, first_q - 5);
    r.kept_last = std::min(n, last_q + 5);
    std::vector<std::size_t> tok;
    std::size_t total = 0;
    for (int i = r.kept_first; i <= r.kept_last; ++i) {
        auto t = text::word_count(doc.sentence(static_cast<std::size_t>(i)));
        if (t > max_len)
            throw ValidationError("truncate_context: sentence " + std::to_string(i) + " alone has " + std::to_string(t) +
                                  " tokens (max " + std::to_string(max_len) + ")");
        tok.push_back(t);
        total += t;
    }
    auto tokens_in = [&](int a, int b) {
        std::size_t s = 0;
        for (int i = a; i <= b; ++i)
            s += tok[static_cast<std::size_t>(i - r.kept_first)];
        return s;
    };
    if (total <= max_len) {
        r.segments.push_back({r.kept_first, r.kept_last, total});
        return r;
    }
    auto cut_allowed = [&](int b) { // cut between sentence b and b + 1
        for (int a : anchors)
            if (b >= a - 3 && b < a + 3)
                return false;
        return true;
    };
    const int count = r.kept_last - r.kept_first + 1;
    const int k_min = static_cast<int>((total + max_len - 1) / max_len);
    for (int k = std::max(2, k_min); k <= count; ++k) {
        std::vector<int> cuts;
        bool ok = true;
        for (int j = 1; j < k && ok; ++j) {
            int ideal = r.kept_first - 1 + static_cast<int>(std::lround(static_cast<double>(j) * count / k));
            int lower = cuts.empty() ? r.kept_first : cuts.back() + 1;
            int chosen = -1;
            for (int d = 0; d <= count && chosen < 0; ++d)
                for (int c : {ideal - d, ideal + d})
                    if (chosen < 0 && c >= lower && c < r.kept_last && cut_allowed(c))
                        chosen = c;
            if (chosen < 0)
                ok = false;
            else
                cuts.push_back(chosen);
        }
        if (!ok)
            continue;
        std::vector<ContextSegment> segs;
        int start = r.kept_first;
        for (int c : cuts) {
            segs.push_back({start, c, tokens_in(start, c)});
            start = c + 1;
        }
        segs.push_back({start, r.kept_last, tokens_in(start, r.kept_last)});
        bool fits = std::all_of(segs.begin(), segs.end(), [&](const auto &s) { return s.tokens <= max_len; });
        if (fits) {
            r.segments = std::move(segs);
            return r;
        }
    }
    throw ValidationError("truncate_context: no segmentation fits max_len without cutting near an anchor");
}

} // namespace gq
