#pragma once

#include "gq/bm25.hpp"
#include "gq/corpus.hpp"
#include "gq/segment.hpp"

#include <string>
#include <vector>

namespace gq {

struct RawArticle {
    std::string doc_id;
    Domain domain = Domain::Textbook;
    std::string title;
    std::string body_text;
    std::map<std::string, std::string> source_meta;
};

struct ExtractedQuestion {
    std::string text;
    int sentence_index = 0; // 0 = title

    bool operator==(const ExtractedQuestion &) const = default;
};

// A segmented document with its mined questions, the output of the extract step.
struct ExtractedDocument {
    Document document;
    std::vector<ExtractedQuestion> questions;

    bool operator==(const ExtractedDocument &) const = default;
};

inline bool ends_with_question_mark(std::string_view s) {
    s = text::trim(s);
    return !s.empty() && s.back() == '?';
}

inline ExtractedDocument extract_questions(const RawArticle &article,
                                           const AbbreviationList &abbreviations = {}) {
    ExtractedDocument out;
    auto &doc = out.document;
    doc.doc_id = article.doc_id;
    doc.domain = article.domain;
    doc.title = text::normalize_whitespace(article.title);
    doc.sentences = segment_sentences(article.body_text, abbreviations);
    doc.source_meta = article.source_meta;

    if (ends_with_question_mark(doc.title))
        out.questions.push_back({doc.title, 0});
    for (std::size_t i = 0; i < doc.sentences.size(); ++i)
        if (ends_with_question_mark(doc.sentences[i]))
            out.questions.push_back({doc.sentences[i], static_cast<int>(i + 1)});
    return out;
}

inline std::vector<ExtractedDocument> filter_corpus(const std::vector<ExtractedDocument> &docs,
                                                    int min_questions = 3) {
    if (min_questions < 1)
        throw ValidationError("min_questions must be >= 1");
    std::vector<ExtractedDocument> kept;
    for (const auto &d : docs)
        if (static_cast<int>(d.questions.size()) >= min_questions)
            kept.push_back(d);
    return kept;
}

// Exact (whitespace-normalized) match first, lowest index on ties; otherwise
// the BM25-best sentence with the document's sentences as the collection.
// Returns a 1-based sentence index.
inline int relocate_anchor(std::string_view anchor_text, const Document &doc, Bm25Params params = {}) {
    auto anchor = text::normalize_whitespace(anchor_text);
    if (anchor.empty())
        throw ValidationError("relocate_anchor: empty anchor text");
    if (doc.sentences.empty())
        throw ValidationError("relocate_anchor: document has no sentences");
    for (std::size_t i = 0; i < doc.sentences.size(); ++i)
        if (text::normalize_whitespace(doc.sentences[i]) == anchor)
            return static_cast<int>(i + 1);
    Bm25Index index(doc.sentences, params);
    return static_cast<int>(index.best(anchor)) + 1;
}

// ---------------------------------------------------------------------------
// JSONL

inline RawArticle raw_article_from_json(const Json &j, const std::string &where) {
    RawArticle a;
    a.doc_id = detail::require_field<std::string>(j, "doc_id", where);
    auto dom = detail::require_field<std::string>(j, "domain", where);
    auto parsed = parse_domain(dom);
    if (!parsed)
        throw ValidationError(where + " (" + a.doc_id + "): field 'domain' has unknown value '" + dom + "'");
    a.domain = *parsed;
    a.title = j.contains("title") ? detail::require_field<std::string>(j, "title", where) : std::string{};
    a.body_text = detail::require_field<std::string>(j, "body_text", where);
    if (text::trim(a.body_text).empty())
        throw ValidationError(where + " (" + a.doc_id + "): body_text is empty");
    if (j.contains("source_meta"))
        a.source_meta = detail::require_field<std::map<std::string, std::string>>(j, "source_meta", where);
    return a;
}

inline Json to_json(const RawArticle &a) {
    Json j;
    j["doc_id"] = a.doc_id;
    j["domain"] = to_string(a.domain);
    j["title"] = a.title;
    j["body_text"] = a.body_text;
    if (!a.source_meta.empty())
        j["source_meta"] = a.source_meta;
    return j;
}

inline std::vector<RawArticle> load_raw_articles(const std::filesystem::path &path) {
    std::vector<RawArticle> out;
    read_jsonl(path, [&](const Json &j, const std::string &where) { out.push_back(raw_article_from_json(j, where)); });
    return out;
}

inline Json to_json(const ExtractedDocument &d) {
    Json j = document_fields_to_json(d.document);
    j["questions"] = Json::array();
    for (const auto &q : d.questions)
        j["questions"].push_back(Json{{"text", q.text}, {"sentence_index", q.sentence_index}});
    return j;
}

inline ExtractedDocument extracted_from_json(const Json &j, const std::string &where) {
    ExtractedDocument d;
    d.document = document_from_json(j, where);
    auto violations = validate_document(d.document);
    if (!violations.empty())
        throw ValidationError(where + " (" + d.document.doc_id + "): " + violations.front());
    if (!j.contains("questions") || !j.at("questions").is_array())
        throw ValidationError(where + ": missing field 'questions'");
    const int n = static_cast<int>(d.document.size());
    for (const auto &qj : j.at("questions")) {
        ExtractedQuestion q;
        q.text = detail::require_field<std::string>(qj, "text", where);
        q.sentence_index = detail::require_field<int>(qj, "sentence_index", where);
        if (q.sentence_index < 0 || q.sentence_index > n)
            throw ValidationError(where + " (" + d.document.doc_id + "): sentence_index out of range");
        d.questions.push_back(std::move(q));
    }
    return d;
}

inline std::vector<ExtractedDocument> load_extracted(const std::filesystem::path &path) {
    std::vector<ExtractedDocument> out;
    read_jsonl(path, [&](const Json &j, const std::string &where) { out.push_back(extracted_from_json(j, where)); });
    return out;
}

inline void save_extracted(const std::vector<ExtractedDocument> &docs, const std::filesystem::path &path) {
    write_jsonl(path, docs, [](const ExtractedDocument &d) { return to_json(d); });
}

} // namespace gq
