#pragma once

#include "gq/error.hpp"
#include "gq/text.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace gq {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kNoAnswer = "NO ANSWER";

enum class Domain { Textbook, Scientific };

inline std::string_view to_string(Domain d) {
    return d == Domain::Textbook ? "Textbook" : "Scientific";
}

inline std::optional<Domain> parse_domain(std::string_view s) {
    if (s == "Textbook")
        return Domain::Textbook;
    if (s == "Scientific")
        return Domain::Scientific;
    return std::nullopt;
}

enum class QuestionRole { ArouseInterest, FramePurpose, OrganizeDiscourse, EstablishClaim, ProvokeThought };

inline constexpr std::array<QuestionRole, 5> kAllRoles = {
    QuestionRole::ArouseInterest, QuestionRole::FramePurpose, QuestionRole::OrganizeDiscourse,
    QuestionRole::EstablishClaim, QuestionRole::ProvokeThought};

inline std::string_view to_string(QuestionRole r) {
    switch (r) {
    case QuestionRole::ArouseInterest:
        return "ArouseInterest";
    case QuestionRole::FramePurpose:
        return "FramePurpose";
    case QuestionRole::OrganizeDiscourse:
        return "OrganizeDiscourse";
    case QuestionRole::EstablishClaim:
        return "EstablishClaim";
    case QuestionRole::ProvokeThought:
        return "ProvokeThought";
    }
    return "";
}

// Strict parse of the serialized role name.
inline std::optional<QuestionRole> parse_role(std::string_view s) {
    for (auto r : kAllRoles)
        if (to_string(r) == s)
            return r;
    return std::nullopt;
}

// Lenient parse for model output: ignores case, spaces, hyphens, underscores
// and surrounding punctuation ("Organize Discourse.", "organize_discourse").
inline std::optional<QuestionRole> parse_role_lenient(std::string_view s) {
    std::string key;
    for (char c : s)
        if (!text::is_space(c) && c != '-' && c != '_' && !text::is_punct(c))
            key.push_back(text::to_lower(c));
    for (auto r : kAllRoles)
        if (text::lowercase(to_string(r)) == key)
            return r;
    return std::nullopt;
}

struct Document {
    std::string doc_id;
    Domain domain = Domain::Textbook;
    std::string title;
    std::vector<std::string> sentences; // sentence i lives at sentences[i - 1]
    std::map<std::string, std::string> source_meta;

    std::size_t size() const { return sentences.size(); }

    // 1-indexed access; index 0 is the title.
    const std::string &sentence(std::size_t index) const {
        return index == 0 ? title : sentences.at(index - 1);
    }

    bool operator==(const Document &) const = default;
};

struct GuidingQuestion {
    std::string qid;
    std::string raw_text;
    std::string completed_text;
    int position = 0; // sentence index of the question; 0 = title
    QuestionRole role = QuestionRole::ProvokeThought;
    std::string answer{kNoAnswer};
    std::vector<std::string> answer_keywords;
    std::vector<int> evidence_indices;
    int confidence_answer = 1;
    int confidence_role = 1;

    bool has_answer() const { return answer != kNoAnswer; }

    bool operator==(const GuidingQuestion &) const = default;
};

struct AnnotatedDocument {
    Document document;
    std::vector<GuidingQuestion> questions;

    bool operator==(const AnnotatedDocument &) const = default;
};

struct CorpusStats {
    Domain domain = Domain::Textbook;
    double n_documents = 0;
    double avg_words_per_doc = 0;
    double n_questions = 0;
    double avg_words_per_question = 0;
    double avg_questions_per_doc = 0;
};

// ---------------------------------------------------------------------------
// Validation

inline std::vector<std::string> validate_document(const Document &doc) {
    std::vector<std::string> v;
    if (doc.doc_id.empty())
        v.push_back("doc_id: empty");
    if (doc.sentences.empty())
        v.push_back("sentences: document must have at least one sentence");
    for (std::size_t i = 0; i < doc.sentences.size(); ++i)
        if (text::trim(doc.sentences[i]).empty())
            v.push_back("sentences[" + std::to_string(i + 1) + "]: empty after trimming");
    return v;
}

inline std::vector<std::string> validate_record(const AnnotatedDocument &rec) {
    auto v = validate_document(rec.document);
    const auto n = static_cast<int>(rec.document.size());
    std::set<std::string> seen;
    int prev_position = -1;
    for (const auto &q : rec.questions) {
        const std::string at = "question " + q.qid + ": ";
        if (q.qid.empty())
            v.push_back("question: empty qid");
        else if (!seen.insert(q.qid).second)
            v.push_back(at + "duplicate qid");
        if (q.position < 0 || q.position > n)
            v.push_back(at + "position " + std::to_string(q.position) + " outside [0, " +
                        std::to_string(n) + "]");
        if ((q.position == 0) != (q.role == QuestionRole::ArouseInterest))
            v.push_back(at + "position 0 iff role ArouseInterest");
        if (q.position < prev_position)
            v.push_back(at + "positions must be non-decreasing");
        prev_position = std::max(prev_position, q.position);
        auto completed = text::trim(q.completed_text);
        if (completed.empty() || completed.back() != '?')
            v.push_back(at + "completed_text must end with '?'");
        if (!q.has_answer() && !q.evidence_indices.empty())
            v.push_back(at + "NO ANSWER question must have empty evidence");
        for (std::size_t i = 0; i < q.evidence_indices.size(); ++i) {
            int e = q.evidence_indices[i];
            if (e < 1 || e > n)
                v.push_back(at + "evidence index " + std::to_string(e) + " is not a sentence index");
            if (i > 0 && e <= q.evidence_indices[i - 1])
                v.push_back(at + "evidence indices must be sorted and distinct");
        }
        if (q.confidence_answer < 1 || q.confidence_answer > 5)
            v.push_back(at + "confidence_answer outside 1-5");
        if (q.confidence_role < 1 || q.confidence_role > 5)
            v.push_back(at + "confidence_role outside 1-5");
    }
    return v;
}

// ---------------------------------------------------------------------------
// JSON

inline Json document_fields_to_json(const Document &d) {
    Json j;
    j["doc_id"] = d.doc_id;
    j["domain"] = to_string(d.domain);
    j["title"] = d.title;
    j["sentences"] = d.sentences;
    if (!d.source_meta.empty())
        j["source_meta"] = d.source_meta;
    return j;
}

inline Json to_json(const GuidingQuestion &q) {
    Json j;
    j["qid"] = q.qid;
    j["raw_text"] = q.raw_text;
    j["completed_text"] = q.completed_text;
    j["position"] = q.position;
    j["role"] = to_string(q.role);
    j["answer"] = q.answer;
    j["answer_keywords"] = q.answer_keywords;
    j["evidence_indices"] = q.evidence_indices;
    j["confidence_answer"] = q.confidence_answer;
    j["confidence_role"] = q.confidence_role;
    return j;
}

inline Json to_json(const AnnotatedDocument &a) {
    Json j = document_fields_to_json(a.document);
    j["questions"] = Json::array();
    for (const auto &q : a.questions)
        j["questions"].push_back(to_json(q));
    return j;
}

namespace detail {

template <typename T>
T require_field(const Json &j, const char *name, const std::string &where) {
    if (!j.is_object() || !j.contains(name))
        throw ValidationError(where + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ValidationError(where + ": field '" + name + "' has the wrong type");
    }
}

} // namespace detail

inline Document document_from_json(const Json &j, const std::string &where = "record") {
    Document d;
    d.doc_id = detail::require_field<std::string>(j, "doc_id", where);
    auto dom = detail::require_field<std::string>(j, "domain", where);
    auto parsed = parse_domain(dom);
    if (!parsed)
        throw ValidationError(where + " (" + d.doc_id + "): field 'domain' has unknown value '" + dom +
                              "'");
    d.domain = *parsed;
    d.title = detail::require_field<std::string>(j, "title", where);
    d.sentences = detail::require_field<std::vector<std::string>>(j, "sentences", where);
    if (j.contains("source_meta"))
        d.source_meta = detail::require_field<std::map<std::string, std::string>>(j, "source_meta", where);
    return d;
}

inline GuidingQuestion question_from_json(const Json &j, const std::string &where) {
    GuidingQuestion q;
    q.qid = detail::require_field<std::string>(j, "qid", where);
    const std::string at = where + " question " + q.qid;
    q.raw_text = detail::require_field<std::string>(j, "raw_text", at);
    q.completed_text = detail::require_field<std::string>(j, "completed_text", at);
    q.position = detail::require_field<int>(j, "position", at);
    auto role = detail::require_field<std::string>(j, "role", at);
    auto parsed = parse_role(role);
    if (!parsed)
        throw ValidationError(at + ": field 'role' has unknown value '" + role + "'");
    q.role = *parsed;
    q.answer = detail::require_field<std::string>(j, "answer", at);
    q.answer_keywords = detail::require_field<std::vector<std::string>>(j, "answer_keywords", at);
    q.evidence_indices = detail::require_field<std::vector<int>>(j, "evidence_indices", at);
    q.confidence_answer = detail::require_field<int>(j, "confidence_answer", at);
    q.confidence_role = detail::require_field<int>(j, "confidence_role", at);
    return q;
}

inline AnnotatedDocument annotated_from_json(const Json &j, const std::string &where = "record") {
    AnnotatedDocument a;
    a.document = document_from_json(j, where);
    const std::string at = where + " (" + a.document.doc_id + ")";
    if (!j.contains("questions") || !j.at("questions").is_array())
        throw ValidationError(at + ": missing field 'questions'");
    for (const auto &qj : j.at("questions"))
        a.questions.push_back(question_from_json(qj, at));
    return a;
}

// ---------------------------------------------------------------------------
// JSONL

// Reads non-blank lines; `parse` receives the JSON value and a "line N" label.
template <typename Fn>
void read_jsonl(const std::filesystem::path &path, Fn &&parse) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty())
            continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": malformed JSON (" +
                                 e.what() + ")",
                             line);
        }
        parse(j, "line " + std::to_string(lineno));
    }
    if (in.bad())
        throw IoError("read failure on " + path.string());
}

template <typename Range, typename ToJson>
void write_jsonl(const std::filesystem::path &path, const Range &items, ToJson &&to_json_fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    for (const auto &item : items)
        out << to_json_fn(item).dump() << '\n';
    if (!out)
        throw IoError("write failure on " + path.string());
}

inline std::vector<AnnotatedDocument> load_corpus(const std::filesystem::path &path) {
    std::vector<AnnotatedDocument> docs;
    read_jsonl(path, [&](const Json &j, const std::string &where) {
        auto rec = annotated_from_json(j, where);
        auto violations = validate_record(rec);
        if (!violations.empty())
            throw ValidationError(where + " (" + rec.document.doc_id + "): " + violations.front());
        docs.push_back(std::move(rec));
    });
    return docs;
}

inline void save_corpus(const std::vector<AnnotatedDocument> &docs, const std::filesystem::path &path) {
    write_jsonl(path, docs, [](const AnnotatedDocument &d) { return to_json(d); });
}

// Aggregate counts for one domain. Words are whitespace tokens; document
// words exclude the title, question words use raw_text.
inline CorpusStats compute_corpus_stats(const std::vector<AnnotatedDocument> &docs, Domain domain) {
    CorpusStats s;
    s.domain = domain;
    double doc_words = 0;
    double question_words = 0;
    for (const auto &d : docs) {
        if (d.document.domain != domain)
            continue;
        s.n_documents += 1;
        for (const auto &sent : d.document.sentences)
            doc_words += static_cast<double>(text::word_count(sent));
        for (const auto &q : d.questions) {
            s.n_questions += 1;
            question_words += static_cast<double>(text::word_count(q.raw_text));
        }
    }
    if (s.n_documents > 0) {
        s.avg_words_per_doc = doc_words / s.n_documents;
        s.avg_questions_per_doc = s.n_questions / s.n_documents;
    }
    if (s.n_questions > 0)
        s.avg_words_per_question = question_words / s.n_questions;
    return s;
}

inline Json to_json(const CorpusStats &s) {
    Json j;
    j["domain"] = to_string(s.domain);
    j["n_documents"] = s.n_documents;
    j["avg_words_per_doc"] = s.avg_words_per_doc;
    j["n_questions"] = s.n_questions;
    j["avg_words_per_question"] = s.avg_words_per_question;
    j["avg_questions_per_doc"] = s.avg_questions_per_doc;
    return j;
}

} // namespace gq
