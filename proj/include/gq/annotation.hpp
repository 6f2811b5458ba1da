#pragma once

#include "gq/backends.hpp"
#include "gq/corpus.hpp"
#include "gq/evidence.hpp"
#include "gq/extraction.hpp"
#include "gq/keywords.hpp"
#include "gq/prompts.hpp"

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace gq {

struct AnnotationOptions {
    double temperature = 0.2;
    int max_tokens = 2048;
    int max_reasks = 2;           // extra attempts after a parse failure
    int context_radius = 5;       // sentences on each side of a question (10 in total)
    int smoothing_radius = 5;     // sentences on each side of a removed sentence
    int evidence_max_sentences = 5;
    std::size_t keywords_k = 8;
    int triage_threshold = 1;
    PromptSet prompts;
};

struct AnnotationItem {
    std::string qid;
    std::string question;
    std::string context;
};

struct AnnotationBatch {
    Document document;
    std::vector<AnnotationItem> items;
};

struct AnswerResult {
    std::string answer; // kNoAnswer when the article does not answer the question
    int confidence = 1;
};

struct RoleQuery {
    std::string question;
    int position = 0;
    std::optional<std::string> answer; // must be filled by the answering step
};

struct RoleResult {
    QuestionRole role = QuestionRole::ProvokeThought;
    std::string analysis;
    int confidence = 1;
};

enum class TriageTask { Answering, RoleId };

inline std::string_view to_string(TriageTask t) { return t == TriageTask::Answering ? "Answering" : "RoleId"; }

struct TriageInput {
    std::string doc_id;
    std::string qid;
    int confidence_answer = 1;
    int confidence_role = 1;
};

struct TriageItem {
    std::string doc_id;
    std::string qid;
    TriageTask task = TriageTask::Answering;
    int confidence = 1;
    bool flagged = false;
};

class ContaminationError : public Error {
  public:
    enum class Reason { MaskRemains, RemovedTextReintroduced, EmptyOutput };

    ContaminationError(Reason reason, const std::string &what, std::string raw)
        : Error(what), reason_(reason), raw_(std::move(raw)) {}

    Reason reason() const noexcept { return reason_; }
    const std::string &raw_text() const noexcept { return raw_; }

  private:
    Reason reason_;
    std::string raw_;
};

// ---------------------------------------------------------------------------
// Response parsing

// Collects "<Label> <i>: value" lines. A value continues over following
// unlabeled lines until the next labeled line. Labels are case-insensitive and
// may be wrapped in markdown emphasis or bullets.
inline std::map<std::string, std::map<int, std::string>> parse_numbered_fields(std::string_view response,
                                                                                const std::vector<std::string> &labels) {
    std::string alternation;
    for (const auto &l : labels)
        alternation += (alternation.empty() ? "" : "|") + l;
    const std::regex line_re("^[\\s*#>-]*(" + alternation + ")\\s+(\\d+)\\s*\\**\\s*:\\s*\\**\\s*(.*)$",
                             std::regex::icase);
    std::map<std::string, std::map<int, std::string>> fields;
    std::string *open = nullptr;
    for (const auto &line : text::split_lines(response)) {
        std::smatch m;
        if (std::regex_match(line, m, line_re)) {
            std::string label;
            for (const auto &l : labels)
                if (text::lowercase(l) == text::lowercase(m[1].str()))
                    label = l;
            int index = std::stoi(m[2].str());
            auto &slot = fields[label][index];
            slot = std::string(text::trim(m[3].str()));
            open = &slot;
        } else if (open != nullptr) {
            auto t = text::trim(line);
            if (t.empty())
                continue;
            if (!open->empty())
                open->push_back(' ');
            open->append(t);
        }
    }
    return fields;
}

inline bool is_no_answer(std::string_view answer) {
    std::string key;
    for (char c : answer)
        if (!text::is_space(c) && !text::is_punct(c))
            key.push_back(text::to_lower(c));
    return key == "noanswer" || key == "noanswerfound" || key == "notanswered";
}

namespace detail {

inline std::optional<int> leading_int(std::string_view s) {
    s = text::trim(s);
    while (!s.empty() && (s.front() == '*' || s.front() == '['))
        s.remove_prefix(1);
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front())))
        return std::nullopt;
    int v = 0;
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && v < 1000)
        v = v * 10 + (s[i++] - '0');
    return v;
}

inline int parse_confidence(std::string_view value, int index, const std::string &raw) {
    auto v = leading_int(value);
    if (!v)
        throw ParseError("confidence " + std::to_string(index) + " is not an integer: '" + std::string(value) + "'", raw);
    if (*v < 1 || *v > 5)
        throw ValidationError("confidence " + std::to_string(index) + " = " + std::to_string(*v) + " outside 1-5");
    return *v;
}

inline std::string ensure_question_mark(std::string_view q) {
    std::string s(text::trim(q));
    if (s.empty() || s.back() != '?')
        s.push_back('?');
    return s;
}

// Calls the backend, re-asking on ParseError up to opts.max_reasks times.
template <typename Parse>
auto ask(TextGenerator &backend, const std::string &prompt, const AnnotationOptions &opts, Parse &&parse)
    -> decltype(parse(std::string{})) {
    GenerationRequest req;
    req.prompt = prompt;
    req.temperature = opts.temperature;
    req.max_tokens = opts.max_tokens;
    for (int attempt = 0;; ++attempt) {
        auto raw = backend.generate_text(req);
        try {
            return parse(raw);
        } catch (const ParseError &) {
            if (attempt >= opts.max_reasks)
                throw;
        }
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Rendering

// Surrounding sentences of position p (excluding p itself), clipped to the
// document. For title questions the window starts at sentence 1.
inline std::string local_context(const Document &doc, int position, int radius) {
    const int n = static_cast<int>(doc.size());
    std::vector<std::string> parts;
    if (position == 0) {
        for (int i = 1; i <= std::min(n, 2 * radius); ++i)
            parts.push_back(doc.sentence(static_cast<std::size_t>(i)));
    } else {
        for (int i = std::max(1, position - radius); i <= std::min(n, position + radius); ++i)
            if (i != position)
                parts.push_back(doc.sentence(static_cast<std::size_t>(i)));
    }
    return text::join(parts, " ");
}

inline AnnotationBatch make_batch(const Document &doc, const std::vector<ExtractedQuestion> &questions,
                                  const std::vector<std::string> &qids, int radius = 5) {
    AnnotationBatch b{doc, {}};
    for (std::size_t i = 0; i < questions.size(); ++i)
        b.items.push_back({qids.at(i), questions[i].text, local_context(doc, questions[i].sentence_index, radius)});
    return b;
}

// Article text with "[Question]" placed before each marked sentence.
inline std::string render_article(const Document &doc, const std::set<int> &marked = {}) {
    std::string out = "Title: ";
    if (marked.count(0))
        out += "[Question] ";
    out += doc.title;
    out += "\n";
    for (std::size_t i = 1; i <= doc.size(); ++i) {
        if (i > 1)
            out.push_back(' ');
        if (marked.count(static_cast<int>(i)))
            out += "[Question] ";
        out += doc.sentence(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// S2: completion

inline std::vector<std::string> complete_questions(const AnnotationBatch &batch, TextGenerator &backend,
                                                   const AnnotationOptions &opts = {}) {
    if (batch.items.empty())
        throw ValidationError("complete_questions: empty batch");
    std::string items;
    for (std::size_t i = 0; i < batch.items.size(); ++i) {
        auto k = std::to_string(i + 1);
        items += "Question " + k + ": " + batch.items[i].question + "\n";
        items += "Context " + k + ": " + batch.items[i].context + "\n";
    }
    auto prompt = render_template(opts.prompts.completion, {{"items", items}});
    const std::size_t n = batch.items.size();
    return detail::ask(backend, prompt, opts, [&](const std::string &raw) {
        auto fields = parse_numbered_fields(raw, {"Question"});
        const auto &qs = fields["Question"];
        if (qs.size() != n || qs.begin()->first != 1 || qs.rbegin()->first != static_cast<int>(n))
            throw ParseError("completion: expected " + std::to_string(n) + " 'Question i:' lines, got " +
                                 std::to_string(qs.size()),
                             raw);
        std::vector<std::string> out;
        for (const auto &[i, q] : qs) {
            if (q.empty())
                throw ParseError("completion: question " + std::to_string(i) + " is empty", raw);
            out.push_back(detail::ensure_question_mark(q));
        }
        return out;
    });
}

// ---------------------------------------------------------------------------
// S3: answering

inline std::vector<AnswerResult> answer_questions(const Document &doc, const std::vector<ExtractedQuestion> &questions,
                                                  TextGenerator &backend, const AnnotationOptions &opts = {}) {
    if (questions.empty())
        return {};
    std::set<int> marked;
    std::string items;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        marked.insert(questions[i].sentence_index);
        items += "Question " + std::to_string(i + 1) + ": " + questions[i].text + "\n";
    }
    auto prompt = render_template(opts.prompts.answering, {{"article", render_article(doc, marked)}, {"items", items}});
    const int n = static_cast<int>(questions.size());
    return detail::ask(backend, prompt, opts, [&](const std::string &raw) {
        auto fields = parse_numbered_fields(raw, {"Answer", "Confidence"});
        std::vector<AnswerResult> out;
        for (int i = 1; i <= n; ++i) {
            auto a = fields["Answer"].find(i);
            if (a == fields["Answer"].end() || a->second.empty())
                throw ParseError("answering: missing 'Answer " + std::to_string(i) + ":' line", raw);
            auto c = fields["Confidence"].find(i);
            if (c == fields["Confidence"].end())
                throw ParseError("answering: missing 'Confidence " + std::to_string(i) + ":' line", raw);
            AnswerResult r;
            r.answer = is_no_answer(a->second) ? std::string(kNoAnswer) : a->second;
            r.confidence = detail::parse_confidence(c->second, i, raw);
            out.push_back(std::move(r));
        }
        return out;
    });
}

// ---------------------------------------------------------------------------
// S5: role identification

// Title questions are ArouseInterest by definition and are not sent to the
// model; the model chooses among the four body roles.
inline std::vector<RoleResult> identify_roles(const Document &doc, const std::vector<RoleQuery> &queries,
                                              TextGenerator &backend, const AnnotationOptions &opts = {}) {
    for (std::size_t i = 0; i < queries.size(); ++i)
        if (!queries[i].answer)
            throw ValidationError("identify_roles: question " + std::to_string(i + 1) +
                                  " has no answer field; run answering first");
    std::vector<RoleResult> out(queries.size());
    std::vector<std::size_t> asked;
    std::string items;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (queries[i].position == 0) {
            out[i] = {QuestionRole::ArouseInterest, "The question is the article title.", 5};
            continue;
        }
        asked.push_back(i);
        auto k = std::to_string(asked.size());
        items += "Question " + k + ": " + queries[i].question + "\n";
        items += "Answer " + k + ": " + *queries[i].answer + "\n";
    }
    if (asked.empty())
        return out;
    auto prompt = render_template(opts.prompts.role_identification, {{"role_definitions", opts.prompts.role_definitions},
                                                                     {"article", render_article(doc)},
                                                                     {"items", items}});
    auto parsed = detail::ask(backend, prompt, opts, [&](const std::string &raw) {
        auto fields = parse_numbered_fields(raw, {"Analysis", "Role", "Confidence"});
        std::vector<RoleResult> rs;
        for (std::size_t k = 1; k <= asked.size(); ++k) {
            const int i = static_cast<int>(k);
            auto r = fields["Role"].find(i);
            if (r == fields["Role"].end())
                throw ParseError("role identification: missing 'Role " + std::to_string(i) + ":' line", raw);
            auto role = parse_role_lenient(r->second);
            if (!role)
                throw ParseError("role identification: '" + r->second + "' is not a question role", raw);
            if (*role == QuestionRole::ArouseInterest)
                throw ParseError("role identification: ArouseInterest is reserved for title questions", raw);
            auto c = fields["Confidence"].find(i);
            if (c == fields["Confidence"].end())
                throw ParseError("role identification: missing 'Confidence " + std::to_string(i) + ":' line", raw);
            auto a = fields["Analysis"].find(i);
            rs.push_back({*role, a == fields["Analysis"].end() ? std::string{} : a->second,
                          detail::parse_confidence(c->second, i, raw)});
        }
        return rs;
    });
    for (std::size_t k = 0; k < asked.size(); ++k)
        out[asked[k]] = parsed[k];
    return out;
}

// ---------------------------------------------------------------------------
// S6: triage

// One item per (question, task). A question is flagged when its confidence is
// <= threshold on both tasks.
inline std::vector<TriageItem> triage_low_confidence(const std::vector<TriageInput> &inputs, int threshold = 1) {
    if (threshold < 1 || threshold > 5)
        throw ValidationError("triage threshold must lie in 1-5");
    std::vector<TriageItem> out;
    for (const auto &in : inputs) {
        bool flagged = in.confidence_answer <= threshold && in.confidence_role <= threshold;
        out.push_back({in.doc_id, in.qid, TriageTask::Answering, in.confidence_answer, flagged});
        out.push_back({in.doc_id, in.qid, TriageTask::RoleId, in.confidence_role, flagged});
    }
    return out;
}

inline std::vector<TriageItem> review_queue(const std::vector<TriageItem> &items) {
    std::vector<TriageItem> out;
    std::copy_if(items.begin(), items.end(), std::back_inserter(out), [](const auto &t) { return t.flagged; });
    return out;
}

inline Json to_json(const TriageItem &t) {
    Json j;
    j["doc_id"] = t.doc_id;
    j["qid"] = t.qid;
    j["task"] = to_string(t.task);
    j["confidence"] = t.confidence;
    j["flagged"] = t.flagged;
    return j;
}

// ---------------------------------------------------------------------------
// Delete and smooth

struct SmoothingResult {
    std::string paragraph;        // coherent text replacing the window
    std::vector<std::string> before; // window sentences before the gap, as sent
    std::vector<std::string> after;  // window sentences after the gap, as sent
};

inline std::string masked_paragraph(const std::vector<std::string> &before, const std::vector<std::string> &after) {
    std::vector<std::string> parts(before);
    parts.emplace_back("[MASK]");
    parts.insert(parts.end(), after.begin(), after.end());
    return text::join(parts, " ");
}

// Asks the backend to repair the gap between `before` and `after`. The output
// must not contain "[MASK]" or any of the removed sentences verbatim.
inline SmoothingResult smooth_gap(const std::vector<std::string> &before, const std::vector<std::string> &after,
                                  const std::vector<std::string> &removed, TextGenerator &backend,
                                  const AnnotationOptions &opts = {}) {
    auto prompt = render_template(opts.prompts.smoothing, {{"paragraph", masked_paragraph(before, after)}});
    GenerationRequest req;
    req.prompt = prompt;
    req.temperature = opts.temperature;
    req.max_tokens = opts.max_tokens;
    std::optional<ContaminationError> last;
    for (int attempt = 0; attempt <= opts.max_reasks; ++attempt) {
        auto raw = backend.generate_text(req);
        std::string_view body = text::trim(raw);
        static constexpr std::string_view kLabel = "coherent paragraph:";
        auto lower = text::lowercase(body);
        if (auto pos = lower.find(kLabel); pos != std::string::npos)
            body = text::trim(body.substr(pos + kLabel.size()));
        auto paragraph = text::normalize_whitespace(body);
        if (paragraph.empty() && !(before.empty() && after.empty())) {
            last.emplace(ContaminationError::Reason::EmptyOutput, "smoothing: empty output", raw);
            continue;
        }
        if (paragraph.find("[MASK]") != std::string::npos) {
            last.emplace(ContaminationError::Reason::MaskRemains, "smoothing: output still contains [MASK]", raw);
            continue;
        }
        bool leaked = false;
        for (const auto &r : removed) {
            auto needle = text::normalize_whitespace(r);
            if (!needle.empty() && paragraph.find(needle) != std::string::npos)
                leaked = true;
        }
        if (leaked) {
            last.emplace(ContaminationError::Reason::RemovedTextReintroduced,
                         "smoothing: output reintroduces the removed sentence", raw);
            continue;
        }
        return {std::move(paragraph), before, after};
    }
    throw *last;
}

// Removes sentence `remove_index` and repairs the local paragraph built from
// up to opts.smoothing_radius sentences on each side.
inline SmoothingResult delete_and_smooth(const Document &doc, int remove_index, TextGenerator &backend,
                                         const AnnotationOptions &opts = {}) {
    const int n = static_cast<int>(doc.size());
    if (remove_index < 1 || remove_index > n)
        throw ValidationError("delete_and_smooth: index " + std::to_string(remove_index) + " outside 1.." +
                              std::to_string(n));
    std::vector<std::string> before, after;
    for (int i = std::max(1, remove_index - opts.smoothing_radius); i < remove_index; ++i)
        before.push_back(doc.sentence(static_cast<std::size_t>(i)));
    for (int i = remove_index + 1; i <= std::min(n, remove_index + opts.smoothing_radius); ++i)
        after.push_back(doc.sentence(static_cast<std::size_t>(i)));
    return smooth_gap(before, after, {doc.sentence(static_cast<std::size_t>(remove_index))}, backend, opts);
}

// ---------------------------------------------------------------------------
// Full annotation of one extracted document: completion, answering, evidence,
// keywords, roles, triage.

struct DocumentAnnotation {
    AnnotatedDocument record;
    std::vector<TriageItem> triage;
    std::vector<std::string> warnings;
};

inline DocumentAnnotation annotate_document(const ExtractedDocument &input, TextGenerator &backend,
                                            const AnnotationOptions &opts = {}) {
    DocumentAnnotation out;
    out.record.document = input.document;
    const auto &doc = input.document;
    if (input.questions.empty())
        return out;

    std::vector<std::string> qids;
    for (std::size_t i = 0; i < input.questions.size(); ++i)
        qids.push_back(doc.doc_id + "-q" + std::to_string(i + 1));

    auto completed = complete_questions(make_batch(doc, input.questions, qids, opts.context_radius), backend, opts);

    std::vector<ExtractedQuestion> asked = input.questions;
    for (std::size_t i = 0; i < asked.size(); ++i)
        asked[i].text = completed[i];
    auto answers = answer_questions(doc, asked, backend, opts);

    EvidenceOptions ev_opts;
    ev_opts.max_sentences = opts.evidence_max_sentences;
    for (const auto &q : input.questions)
        if (q.sentence_index > 0)
            ev_opts.excluded.insert(q.sentence_index);

    std::vector<RoleQuery> role_queries;
    for (std::size_t i = 0; i < asked.size(); ++i) {
        GuidingQuestion q;
        q.qid = qids[i];
        q.raw_text = input.questions[i].text;
        q.completed_text = completed[i];
        q.position = input.questions[i].sentence_index;
        q.answer = answers[i].answer;
        q.confidence_answer = answers[i].confidence;
        if (q.has_answer()) {
            auto ev = extract_evidence(q.answer, doc, ev_opts);
            q.evidence_indices = ev.indices;
            if (!ev.indices.empty()) {
                std::vector<std::string> ev_text;
                for (int e : ev.indices)
                    ev_text.push_back(doc.sentence(static_cast<std::size_t>(e)));
                auto kw = extract_answer_keywords(ev_text, doc.sentences, opts.keywords_k);
                q.answer_keywords = kw.keywords;
                for (auto &w : kw.warnings)
                    out.warnings.push_back(q.qid + ": " + w);
            } else {
                out.warnings.push_back(q.qid + ": answer matched no sentence; evidence is empty");
            }
        }
        role_queries.push_back({q.completed_text, q.position, q.answer});
        out.record.questions.push_back(std::move(q));
    }

    auto roles = identify_roles(doc, role_queries, backend, opts);
    std::vector<TriageInput> triage_inputs;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        auto &q = out.record.questions[i];
        q.role = roles[i].role;
        q.confidence_role = roles[i].confidence;
        triage_inputs.push_back({doc.doc_id, q.qid, q.confidence_answer, q.confidence_role});
    }
    out.triage = triage_low_confidence(triage_inputs, opts.triage_threshold);
    return out;
}

} // namespace gq
