#pragma once

// Question generation against a text backend: fine-tuned paradigms served
// over the wire and zero-shot prompting. Outputs are parsed, their anchors
// relocated into the input document, and assembled in position order.

#include "gq/annotation.hpp"
#include "gq/backends.hpp"
#include "gq/datagen.hpp"
#include "gq/extraction.hpp"

#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace gq {

enum class GenParadigm { Pipeline, Multitask, Joint, JointR, ZeroShot };

inline std::string_view to_string(GenParadigm p) {
    switch (p) {
    case GenParadigm::Pipeline:
        return "Pipeline";
    case GenParadigm::Multitask:
        return "Multitask";
    case GenParadigm::Joint:
        return "Joint";
    case GenParadigm::JointR:
        return "JointR";
    case GenParadigm::ZeroShot:
        return "ZeroShot";
    }
    return "";
}

inline std::optional<GenParadigm> parse_gen_paradigm(std::string_view s) {
    for (auto p : {GenParadigm::Pipeline, GenParadigm::Multitask, GenParadigm::Joint, GenParadigm::JointR,
                   GenParadigm::ZeroShot})
        if (text::lowercase(to_string(p)) == text::lowercase(s))
            return p;
    return std::nullopt;
}

struct GeneratedItem {
    std::string question;
    int position = 0; // anchor index in the input document; 0 = title
    std::vector<std::string> answer_keywords;
    std::optional<QuestionRole> role;
    std::string raw_anchor;

    bool operator==(const GeneratedItem &) const = default;
};

struct GeneratedQuestionSet {
    std::string doc_id;
    GenParadigm paradigm = GenParadigm::Joint;
    std::vector<GeneratedItem> items;
    std::vector<std::string> raw_outputs; // model text, one entry per call that produced anchors
    std::vector<std::string> warnings;

    std::vector<std::string> questions() const {
        std::vector<std::string> out;
        for (const auto &i : items)
            out.push_back(i.question);
        return out;
    }
};

inline Json to_json(const GeneratedItem &i) {
    Json j;
    j["question"] = i.question;
    j["position"] = i.position;
    j["answer_keywords"] = i.answer_keywords;
    j["role"] = i.role ? Json(std::string(to_string(*i.role))) : Json(nullptr);
    j["raw_anchor"] = i.raw_anchor;
    return j;
}

inline Json to_json(const GeneratedQuestionSet &s) {
    Json j;
    j["doc_id"] = s.doc_id;
    j["paradigm"] = to_string(s.paradigm);
    Json items = Json::array();
    for (const auto &i : s.items)
        items.push_back(to_json(i));
    j["items"] = std::move(items);
    j["raw_outputs"] = s.raw_outputs;
    j["warnings"] = s.warnings;
    return j;
}

inline GeneratedQuestionSet generated_set_from_json(const Json &j, const std::string &where) {
    GeneratedQuestionSet s;
    s.doc_id = detail::require_field<std::string>(j, "doc_id", where);
    auto p = parse_gen_paradigm(detail::require_field<std::string>(j, "paradigm", where));
    if (!p)
        throw ValidationError(where + ": unknown paradigm");
    s.paradigm = *p;
    for (const auto &ij : detail::require_field<Json>(j, "items", where)) {
        GeneratedItem i;
        i.question = detail::require_field<std::string>(ij, "question", where);
        i.position = detail::require_field<int>(ij, "position", where);
        i.answer_keywords = ij.value("answer_keywords", std::vector<std::string>{});
        if (ij.contains("role") && !ij["role"].is_null()) {
            i.role = parse_role(ij["role"].get<std::string>());
            if (!i.role)
                throw ValidationError(where + ": unknown role '" + ij["role"].get<std::string>() + "'");
        }
        i.raw_anchor = ij.value("raw_anchor", std::string{});
        if (i.question.empty() || i.question.back() != '?')
            throw ValidationError(where + ": generated question must end with '?'");
        if (i.position < 0)
            throw ValidationError(where + ": negative position");
        s.items.push_back(std::move(i));
    }
    s.raw_outputs = j.value("raw_outputs", std::vector<std::string>{});
    s.warnings = j.value("warnings", std::vector<std::string>{});
    return s;
}

inline std::vector<GeneratedQuestionSet> load_generated(const std::filesystem::path &path) {
    std::vector<GeneratedQuestionSet> out;
    read_jsonl(path, [&](const Json &j, const std::string &where) { out.push_back(generated_set_from_json(j, where)); });
    return out;
}

inline void save_generated(const std::vector<GeneratedQuestionSet> &sets, const std::filesystem::path &path) {
    write_jsonl(path, sets, [](const GeneratedQuestionSet &s) { return to_json(s); });
}

struct FinetunedModels {
    std::string pp = "gq-pp";
    std::string ae = "gq-ae";
    std::string qg = "gq-qg";
    std::string multitask = "gq-multitask";
    std::string joint = "gq-joint";
    std::string jointr = "gq-jointr";
};

struct GenerationOptions {
    FinetunedModels models;
    std::string zero_shot_model; // empty selects the backend default
    double temperature = 0.0;
    int max_tokens = 1024;
    std::size_t concurrency = 4;
    std::size_t max_context_tokens = 0; // 0 disables segmentation
    int max_extensions = 3;             // continuation attempts in control_question_count
    PromptSet prompts;
};

// Title match maps to 0; otherwise exact sentence match, then BM25.
inline int relocate_generated_anchor(std::string_view anchor, const Document &doc) {
    if (text::normalize_whitespace(anchor) == text::normalize_whitespace(doc.title))
        return 0;
    return relocate_anchor(anchor, doc);
}

inline std::vector<std::string> parse_keyword_payload(std::string_view payload) {
    std::vector<std::string> out;
    if (is_no_answer(payload))
        return out;
    for (const auto &piece : split_unescaped(payload, ',')) {
        auto k = unescape_joint_payload(text::trim(piece.text));
        if (!k.empty())
            out.push_back(std::move(k));
    }
    return out;
}

inline std::vector<std::string> parse_pp_output(std::string_view raw) {
    std::vector<std::string> out;
    for (const auto &piece : split_unescaped(raw, '|')) {
        auto a = unescape_joint_payload(text::trim(piece.text));
        if (!text::trim(a).empty())
            out.emplace_back(text::trim(a));
    }
    return out;
}

namespace detail {

inline GenerationRequest gen_request(std::string prompt, const std::string &model, const GenerationOptions &o) {
    GenerationRequest r;
    r.prompt = std::move(prompt);
    r.model = model;
    r.temperature = o.temperature;
    r.max_tokens = o.max_tokens;
    return r;
}

inline void sort_items(std::vector<GeneratedItem> &items) {
    std::stable_sort(items.begin(), items.end(), [](const auto &a, const auto &b) { return a.position < b.position; });
}

inline std::string finish_question(std::string q, std::vector<std::string> &warnings) {
    auto fixed = ensure_question_mark(q);
    if (fixed != text::trim(q))
        warnings.push_back("generated question lacked '?': " + std::string(text::trim(q)));
    return fixed;
}

// AE and QG for each anchor position (pipeline and multitask).
inline std::vector<GeneratedItem> answer_and_ask(const Document &doc, const std::vector<std::string> &anchors,
                                                 bool multitask, TextGenerator &backend, const GenerationOptions &o,
                                                 std::vector<std::string> &warnings) {
    struct Slot {
        std::string anchor;
        int position;
    };
    std::vector<Slot> slots;
    for (const auto &a : anchors)
        slots.push_back({a, relocate_generated_anchor(a, doc)});
    auto prefix = [&](std::string_view p, std::string s) { return multitask ? std::string(p) + s : s; };
    const auto &ae_model = multitask ? o.models.multitask : o.models.ae;
    const auto &qg_model = multitask ? o.models.multitask : o.models.qg;
    auto results = parallel_map(slots, o.concurrency, [&](const Slot &s) {
        auto marked = render_model_input(doc, s.position);
        auto kw_raw = backend.generate_text(gen_request(prefix(kPrefixAE, marked), ae_model, o));
        auto keywords = parse_keyword_payload(kw_raw);
        auto q = backend.generate_text(gen_request(prefix(kPrefixQG, qg_input(marked, keywords)), qg_model, o));
        return std::make_pair(GeneratedItem{std::string(text::trim(q)), s.position, keywords, std::nullopt, s.anchor},
                              kw_raw);
    });
    std::vector<GeneratedItem> out;
    for (auto &[item, kw_raw] : results) {
        if (item.question.empty()) {
            warnings.push_back("empty question generated at anchor " + std::to_string(item.position));
            continue;
        }
        item.question = finish_question(item.question, warnings);
        out.push_back(std::move(item));
    }
    return out;
}

inline std::vector<GeneratedItem> items_from_joint(const std::vector<JointEntry> &entries, const Document &doc) {
    std::vector<GeneratedItem> out;
    for (const auto &e : entries)
        out.push_back({e.question, relocate_generated_anchor(e.anchor_sentence, doc), e.answer_keywords, e.role,
                       e.anchor_sentence});
    return out;
}

} // namespace detail

struct ZeroShotBlock {
    std::string anchor;
    std::vector<std::string> keywords;
    std::string question;
};

// Splits the response on "Output k:" headers; a block lacking any of the
// three fields is skipped with a warning.
inline std::vector<ZeroShotBlock> parse_zero_shot_blocks(std::string_view raw, std::vector<std::string> &warnings) {
    static const std::regex header(R"(^\s*Output\s+(\d+)\s*:\s*(.*)$)", std::regex::icase);
    std::vector<std::vector<std::string>> blocks;
    std::vector<std::string> labels;
    for (const auto &line : text::split_lines(raw)) {
        std::smatch m;
        if (std::regex_match(line, m, header)) {
            blocks.emplace_back();
            labels.push_back(m[1].str());
            if (!text::trim(m[2].str()).empty())
                blocks.back().push_back(m[2].str());
        } else if (!blocks.empty()) {
            blocks.back().push_back(line);
        } else if (!text::trim(line).empty()) {
            // Tolerate a response that omits the first header.
            blocks.emplace_back();
            labels.emplace_back("1");
            blocks.back().push_back(line);
        }
    }
    std::vector<ZeroShotBlock> out;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        std::optional<std::string> pos, kw, q;
        for (const auto &line : blocks[b]) {
            auto t = std::string(text::trim(line));
            auto field = [&](std::string_view label, std::optional<std::string> &slot) {
                if (!slot && text::starts_with_ci(t, label))
                    slot = std::string(text::trim(std::string_view(t).substr(label.size())));
            };
            field("Position:", pos);
            field("Answer Keywords:", kw);
            field("Question:", q);
        }
        if (!pos || pos->empty() || !q || q->empty() || !kw) {
            warnings.push_back("zero-shot output " + labels[b] + " skipped: missing Position, Answer Keywords or Question");
            continue;
        }
        ZeroShotBlock blk{*pos, {}, *q};
        for (auto piece : split_unescaped(*kw, ',')) {
            auto k = std::string(text::trim(piece.text));
            if (!k.empty())
                blk.keywords.push_back(std::move(k));
        }
        out.push_back(std::move(blk));
    }
    return out;
}

namespace detail {

inline GeneratedQuestionSet run_single(const Document &doc, GenParadigm paradigm, TextGenerator &backend,
                                       const GenerationOptions &o) {
    GeneratedQuestionSet set;
    set.doc_id = doc.doc_id;
    set.paradigm = paradigm;
    const auto plain = render_model_input(doc);
    switch (paradigm) {
    case GenParadigm::Pipeline:
    case GenParadigm::Multitask: {
        const bool mt = paradigm == GenParadigm::Multitask;
        auto raw = backend.generate_text(
            gen_request(mt ? std::string(kPrefixPP) + plain : plain, mt ? o.models.multitask : o.models.pp, o));
        auto anchors = parse_pp_output(raw);
        if (anchors.empty()) {
            set.warnings.push_back("position prediction produced no parseable anchors");
            return set;
        }
        set.raw_outputs.push_back(raw);
        set.items = answer_and_ask(doc, anchors, mt, backend, o, set.warnings);
        break;
    }
    case GenParadigm::Joint:
    case GenParadigm::JointR: {
        const bool roles = paradigm == GenParadigm::JointR;
        auto raw = backend.generate_text(gen_request(plain, roles ? o.models.jointr : o.models.joint, o));
        set.raw_outputs.push_back(raw);
        set.items = items_from_joint(parse_joint(raw, roles), doc);
        break;
    }
    case GenParadigm::ZeroShot: {
        auto prompt = render_template(o.prompts.zero_shot_generation, {{"article", render_article(doc)}});
        auto raw = backend.generate_text(gen_request(prompt, o.zero_shot_model, o));
        auto blocks = parse_zero_shot_blocks(raw, set.warnings);
        if (blocks.empty())
            throw ParseError("zero-shot generation: no parseable output blocks", raw);
        set.raw_outputs.push_back(raw);
        for (auto &b : blocks)
            set.items.push_back({finish_question(b.question, set.warnings), relocate_generated_anchor(b.anchor, doc),
                                 std::move(b.keywords), std::nullopt, b.anchor});
        break;
    }
    }
    sort_items(set.items);
    return set;
}

inline Document sub_document(const Document &doc, int first, int last) {
    Document d;
    d.doc_id = doc.doc_id;
    d.domain = doc.domain;
    d.title = doc.title;
    d.source_meta = doc.source_meta;
    for (int i = std::max(1, first); i <= last; ++i)
        d.sentences.push_back(doc.sentence(static_cast<std::size_t>(i)));
    return d;
}

} // namespace detail

// Runs one paradigm on a question-free document. When the rendered document
// exceeds max_context_tokens it is split with truncate_context, each segment
// runs separately, and results merge by original index with exact duplicates
// at the same anchor dropped.
inline GeneratedQuestionSet generate_questions(const Document &doc, GenParadigm paradigm, TextGenerator &backend,
                                               const GenerationOptions &o = {}) {
    std::size_t total = 0;
    for (std::size_t i = 0; i <= doc.size(); ++i)
        total += text::word_count(doc.sentence(i));
    if (o.max_context_tokens == 0 || total <= o.max_context_tokens || doc.size() < 2)
        return detail::run_single(doc, paradigm, backend, o);

    auto plan = truncate_context(doc, 1, static_cast<int>(doc.size()), o.max_context_tokens);
    GeneratedQuestionSet merged;
    merged.doc_id = doc.doc_id;
    merged.paradigm = paradigm;
    std::set<std::pair<int, std::string>> seen;
    for (const auto &seg : plan.segments) {
        auto sub = detail::sub_document(doc, seg.first, seg.last);
        if (sub.sentences.empty())
            continue;
        auto part = detail::run_single(sub, paradigm, backend, o);
        const int offset = std::max(1, seg.first) - 1;
        for (auto &item : part.items) {
            if (item.position > 0)
                item.position += offset;
            if (seen.insert({item.position, item.question}).second)
                merged.items.push_back(std::move(item));
        }
        merged.raw_outputs.insert(merged.raw_outputs.end(), part.raw_outputs.begin(), part.raw_outputs.end());
        merged.warnings.insert(merged.warnings.end(), part.warnings.begin(), part.warnings.end());
    }
    detail::sort_items(merged.items);
    return merged;
}

inline GeneratedQuestionSet run_finetuned(const Document &doc, GenParadigm paradigm, TextGenerator &backend,
                                          const GenerationOptions &o = {}) {
    if (paradigm == GenParadigm::ZeroShot)
        throw ValidationError("run_finetuned: ZeroShot is not a fine-tuned paradigm");
    return generate_questions(doc, paradigm, backend, o);
}

inline GeneratedQuestionSet run_zero_shot(const Document &doc, TextGenerator &backend, const GenerationOptions &o = {}) {
    return generate_questions(doc, GenParadigm::ZeroShot, backend, o);
}

// Truncates to the first `target` items by position, or asks the backend to
// continue its last output with end-of-sequence suppressed until `target`
// is reached or max_extensions attempts are spent.
inline GeneratedQuestionSet control_question_count(GeneratedQuestionSet set, std::size_t target, const Document &doc,
                                                   TextGenerator &backend, const GenerationOptions &o = {}) {
    if (target < 1)
        throw ValidationError("control_question_count: target must be >= 1");
    detail::sort_items(set.items);
    std::set<std::pair<int, std::string>> seen;
    for (const auto &i : set.items)
        seen.insert({i.position, i.question});
    const auto plain = render_model_input(doc);
    for (int attempt = 0; attempt < o.max_extensions && set.items.size() < target; ++attempt) {
        const std::string last = set.raw_outputs.empty() ? std::string{} : set.raw_outputs.back();
        GenerationRequest req;
        std::vector<GeneratedItem> fresh;
        std::string extension;
        switch (set.paradigm) {
        case GenParadigm::Joint:
        case GenParadigm::JointR: {
            const bool roles = set.paradigm == GenParadigm::JointR;
            req = detail::gen_request(plain, roles ? o.models.jointr : o.models.joint, o);
            req.prefix = last.empty() ? std::string{} : last + " | ";
            req.suppress_eos = true;
            extension = backend.generate_text(req);
            auto outcome = parse_joint_records(extension, roles);
            for (const auto &e : outcome.errors)
                set.warnings.push_back("continuation record at offset " + std::to_string(e.offset) + ": " + e.message);
            fresh = detail::items_from_joint(outcome.entries, doc);
            break;
        }
        case GenParadigm::Pipeline:
        case GenParadigm::Multitask: {
            const bool mt = set.paradigm == GenParadigm::Multitask;
            req = detail::gen_request(mt ? std::string(kPrefixPP) + plain : plain, mt ? o.models.multitask : o.models.pp, o);
            req.prefix = last.empty() ? std::string{} : last + " | ";
            req.suppress_eos = true;
            extension = backend.generate_text(req);
            auto anchors = parse_pp_output(extension);
            fresh = detail::answer_and_ask(doc, anchors, mt, backend, o, set.warnings);
            break;
        }
        case GenParadigm::ZeroShot: {
            req = detail::gen_request(render_template(o.prompts.zero_shot_generation, {{"article", render_article(doc)}}),
                                      o.zero_shot_model, o);
            req.prefix = last.empty() ? std::string{} : last + "\n\n";
            req.suppress_eos = true;
            extension = backend.generate_text(req);
            for (auto &b : parse_zero_shot_blocks(extension, set.warnings))
                fresh.push_back({detail::finish_question(b.question, set.warnings),
                                 relocate_generated_anchor(b.anchor, doc), std::move(b.keywords), std::nullopt, b.anchor});
            break;
        }
        }
        if (!extension.empty())
            set.raw_outputs.push_back(last + (set.paradigm == GenParadigm::ZeroShot ? "\n\n" : " | ") + extension);
        for (auto &f : fresh)
            if (seen.insert({f.position, f.question}).second)
                set.items.push_back(std::move(f));
        detail::sort_items(set.items);
    }
    if (set.items.size() > target)
        set.items.resize(target);
    else if (set.items.size() < target)
        set.warnings.push_back("only " + std::to_string(set.items.size()) + " of " + std::to_string(target) +
                               " questions after " + std::to_string(o.max_extensions) + " continuation attempts");
    return set;
}

} // namespace gq
