#pragma once

// Evaluation metrics for generated question sets.

#include "gq/annotation.hpp"
#include "gq/backends.hpp"
#include "gq/corpus.hpp"
#include "gq/generation.hpp"
#include "gq/porter.hpp"
#include "gq/rouge.hpp"

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gq {

namespace detail {

// Order-independent mean: summing in sorted order makes the result bitwise
// identical under any permutation of the inputs.
inline double sorted_mean(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    double s = 0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

} // namespace detail

// ---------------------------------------------------------------------------
// Meteor (exact + Porter-stem stages, no paraphrase table)

struct MeteorParams {
    double alpha = 0.9;
    double gamma = 0.5;
    double beta = 3.0;
};

struct MeteorDetail {
    std::size_t matches = 0;
    std::size_t chunks = 0;
    double precision = 0;
    double recall = 0;
    double score = 0;
};

namespace detail {

// Aligns each candidate token to an unmatched reference token accepted by
// `same`, preferring the one closest to just after the previous match.
template <typename Same>
void align_stage(const std::vector<std::string> &cand, const std::vector<std::string> &ref, std::vector<int> &c2r,
                 std::vector<bool> &ref_used, Same &&same) {
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (c2r[i] >= 0)
            continue;
        int prev = -1;
        for (std::size_t k = i; k-- > 0;)
            if (c2r[k] >= 0) {
                prev = c2r[k];
                break;
            }
        const int want = prev + 1;
        int best = -1;
        for (std::size_t j = 0; j < ref.size(); ++j) {
            if (ref_used[j] || !same(cand[i], ref[j]))
                continue;
            int jj = static_cast<int>(j);
            if (best < 0 || std::abs(jj - want) < std::abs(best - want))
                best = jj;
        }
        if (best >= 0) {
            c2r[i] = best;
            ref_used[static_cast<std::size_t>(best)] = true;
        }
    }
}

} // namespace detail

inline MeteorDetail meteor_detail(std::string_view candidate, std::string_view reference, const MeteorParams &p = {}) {
    auto cand = text::metric_tokens(candidate);
    auto ref = text::metric_tokens(reference);
    MeteorDetail d;
    if (cand.empty() || ref.empty())
        return d;
    std::vector<int> c2r(cand.size(), -1);
    std::vector<bool> used(ref.size(), false);
    detail::align_stage(cand, ref, c2r, used, [](const std::string &a, const std::string &b) { return a == b; });
    detail::align_stage(cand, ref, c2r, used, [](const std::string &a, const std::string &b) {
        return text::porter_stem(a) == text::porter_stem(b);
    });
    int last_ref = -2;
    bool in_chunk = false;
    for (int r : c2r) {
        if (r < 0) {
            in_chunk = false;
            continue;
        }
        ++d.matches;
        if (!in_chunk || r != last_ref + 1)
            ++d.chunks;
        in_chunk = true;
        last_ref = r;
    }
    if (d.matches == 0)
        return d;
    const double m = static_cast<double>(d.matches);
    d.precision = m / static_cast<double>(cand.size());
    d.recall = m / static_cast<double>(ref.size());
    const double fmean = d.precision * d.recall / (p.alpha * d.precision + (1 - p.alpha) * d.recall);
    const double penalty = p.gamma * std::pow(static_cast<double>(d.chunks) / m, p.beta);
    d.score = fmean * (1 - penalty);
    return d;
}

inline double meteor_lite(std::string_view candidate, std::string_view reference, const MeteorParams &p = {}) {
    return meteor_detail(candidate, reference, p).score;
}

// ---------------------------------------------------------------------------
// Dist-N

struct NgramTally {
    std::set<std::vector<std::string>> distinct;
    std::size_t total = 0;
};

// n-grams never span two questions.
inline NgramTally tally_ngrams(const std::vector<std::string> &questions, std::size_t n) {
    NgramTally t;
    for (const auto &q : questions) {
        auto tok = text::metric_tokens(q);
        for (std::size_t i = 0; i + n <= tok.size(); ++i) {
            t.distinct.emplace(tok.begin() + static_cast<long>(i), tok.begin() + static_cast<long>(i + n));
            ++t.total;
        }
    }
    return t;
}

inline double dist_n(const std::vector<std::string> &questions, std::size_t n) {
    if (n < 1)
        throw ValidationError("dist_n: n must be >= 1");
    auto t = tally_ngrams(questions, n);
    if (t.total == 0)
        throw ValidationError("dist_n: no " + std::to_string(n) + "-grams in the question list");
    return static_cast<double>(t.distinct.size()) / static_cast<double>(t.total);
}

// Mean of per-document Dist-N; documents without any n-gram are skipped.
inline std::optional<double> dist_n_by_document(const std::vector<std::vector<std::string>> &question_sets,
                                                std::size_t n) {
    std::vector<double> per_doc;
    for (const auto &qs : question_sets)
        if (tally_ngrams(qs, n).total > 0)
            per_doc.push_back(dist_n(qs, n));
    if (per_doc.empty())
        return std::nullopt;
    return detail::sorted_mean(per_doc);
}

// ---------------------------------------------------------------------------
// Embedding-based greedy matching

inline double cosine(const std::vector<double> &a, const std::vector<double> &b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0)
        return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Precision: mean over candidate tokens of the best cosine against the
// reference; recall symmetrically. No idf weighting, no rescaling.
inline PrfScore semantic_score(std::string_view candidate, std::string_view reference, TokenEmbedder &embedder) {
    if (text::trim(candidate).empty() || text::trim(reference).empty())
        return {};
    auto c = embedder.embed_tokens(candidate);
    auto r = embedder.embed_tokens(reference);
    auto side = [](const std::vector<TokenEmbedding> &from, const std::vector<TokenEmbedding> &to) {
        double sum = 0;
        for (const auto &x : from) {
            double best = -1.0;
            for (const auto &y : to)
                best = std::max(best, cosine(x.vector, y.vector));
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };
    PrfScore s;
    s.precision = side(c, r);
    s.recall = side(r, c);
    s.f = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
}

// ---------------------------------------------------------------------------
// Set-level evaluation

struct DocumentScores {
    std::string doc_id;
    Domain domain = Domain::Textbook;
    std::size_t n_generated = 0;
    std::size_t n_reference = 0;
    double rouge_l = 0;
    double meteor = 0;
    std::optional<double> semantic_f;
};

struct SubsetScores {
    std::size_t n_documents = 0;
    double n_questions_avg = 0;
    double rouge_l = 0;
    double meteor = 0;
    std::optional<double> semantic_f;
    std::optional<double> dist1;
    std::optional<double> dist2;
};

struct EvalReport {
    std::string system;
    std::map<std::string, SubsetScores> subsets; // "Textbook", "Scientific", "All"
    std::vector<DocumentScores> documents;
    std::vector<std::string> missing_generated; // reference docs with no generated set
    std::vector<std::string> missing_reference; // generated sets with no reference doc
    std::vector<std::string> warnings;
};

struct EvalOptions {
    std::string system = "system";
    bool include_title_questions = false;
};

inline std::vector<std::string> reference_questions(const AnnotatedDocument &doc, bool include_title = false) {
    std::vector<const GuidingQuestion *> qs;
    for (const auto &q : doc.questions)
        if (include_title || q.position > 0)
            qs.push_back(&q);
    std::stable_sort(qs.begin(), qs.end(), [](auto a, auto b) { return a->position < b->position; });
    std::vector<std::string> out;
    for (auto q : qs)
        out.push_back(q->completed_text);
    return out;
}

inline std::vector<std::string> ordered_questions(const GeneratedQuestionSet &set) {
    auto items = set.items;
    std::stable_sort(items.begin(), items.end(), [](const auto &a, const auto &b) { return a.position < b.position; });
    std::vector<std::string> out;
    for (const auto &i : items)
        out.push_back(i.question);
    return out;
}

namespace detail {

inline SubsetScores summarize(const std::vector<const DocumentScores *> &docs,
                              const std::vector<std::vector<std::string>> &questions) {
    SubsetScores s;
    s.n_documents = docs.size();
    if (docs.empty())
        return s;
    std::vector<double> nq, rl, mt, sf;
    for (auto d : docs) {
        nq.push_back(static_cast<double>(d->n_generated));
        rl.push_back(d->rouge_l);
        mt.push_back(d->meteor);
        if (d->semantic_f)
            sf.push_back(*d->semantic_f);
    }
    s.n_questions_avg = sorted_mean(nq);
    s.rouge_l = sorted_mean(rl);
    s.meteor = sorted_mean(mt);
    if (sf.size() == docs.size())
        s.semantic_f = sorted_mean(sf);
    s.dist1 = dist_n_by_document(questions, 1);
    s.dist2 = dist_n_by_document(questions, 2);
    return s;
}

} // namespace detail

// Per document, both sides' questions are newline-joined in position order
// and scored as one sequence. Dist-N is the mean of per-document values.
inline EvalReport evaluate_question_sets(const std::vector<GeneratedQuestionSet> &generated,
                                         const std::vector<AnnotatedDocument> &reference, TokenEmbedder *embedder,
                                         const EvalOptions &opts = {}) {
    EvalReport rep;
    rep.system = opts.system;
    std::map<std::string, const GeneratedQuestionSet *> gen_by_id;
    for (const auto &g : generated)
        gen_by_id[g.doc_id] = &g;
    std::set<std::string> ref_ids;
    std::vector<std::vector<std::string>> gen_questions;
    for (const auto &ref : reference) {
        const auto &id = ref.document.doc_id;
        ref_ids.insert(id);
        auto it = gen_by_id.find(id);
        if (it == gen_by_id.end()) {
            rep.missing_generated.push_back(id);
            continue;
        }
        auto refq = reference_questions(ref, opts.include_title_questions);
        if (refq.empty()) {
            rep.warnings.push_back(id + ": no reference questions to compare against; excluded");
            continue;
        }
        auto genq = ordered_questions(*it->second);
        DocumentScores d;
        d.doc_id = id;
        d.domain = ref.document.domain;
        d.n_generated = genq.size();
        d.n_reference = refq.size();
        if (genq.empty()) {
            rep.warnings.push_back(id + ": empty generated set scored as zero");
            if (embedder)
                d.semantic_f = 0.0;
        } else {
            auto cand = text::join(genq, "\n");
            auto refs = text::join(refq, "\n");
            d.rouge_l = rouge_l(cand, refs);
            d.meteor = meteor_lite(cand, refs);
            if (embedder)
                d.semantic_f = semantic_score(cand, refs, *embedder).f;
        }
        rep.documents.push_back(d);
        gen_questions.push_back(std::move(genq));
    }
    for (const auto &g : generated)
        if (!ref_ids.count(g.doc_id))
            rep.missing_reference.push_back(g.doc_id);
    if (!embedder)
        rep.warnings.push_back("no embedding backend; BertScore not computed");

    for (auto dom : {std::optional<Domain>(Domain::Textbook), std::optional<Domain>(Domain::Scientific),
                     std::optional<Domain>()}) {
        std::vector<const DocumentScores *> ds;
        std::vector<std::vector<std::string>> qs;
        for (std::size_t i = 0; i < rep.documents.size(); ++i)
            if (!dom || rep.documents[i].domain == *dom) {
                ds.push_back(&rep.documents[i]);
                qs.push_back(gen_questions[i]);
            }
        if (ds.empty())
            continue;
        rep.subsets[dom ? std::string(to_string(*dom)) : "All"] = detail::summarize(ds, qs);
    }
    return rep;
}

// Dist-1/2 of the reference questions themselves.
inline std::pair<std::optional<double>, std::optional<double>>
reference_dist(const std::vector<AnnotatedDocument> &docs, std::optional<Domain> domain = std::nullopt,
               bool include_title = false) {
    std::vector<std::vector<std::string>> qs;
    for (const auto &d : docs)
        if (!domain || d.document.domain == *domain)
            qs.push_back(reference_questions(d, include_title));
    return {dist_n_by_document(qs, 1), dist_n_by_document(qs, 2)};
}

inline Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

inline Json to_json(const SubsetScores &s) {
    Json j;
    j["documents"] = s.n_documents;
    j["# Q"] = s.n_questions_avg;
    j["Rouge-L"] = s.rouge_l;
    j["Meteor"] = s.meteor;
    j["BertScore"] = optional_json(s.semantic_f);
    j["Dist-1"] = optional_json(s.dist1);
    j["Dist-2"] = optional_json(s.dist2);
    return j;
}

inline Json to_json(const EvalReport &r) {
    Json j;
    j["system"] = r.system;
    Json subsets = Json::object();
    for (const auto &[name, s] : r.subsets)
        subsets[name] = to_json(s);
    j["subsets"] = std::move(subsets);
    Json docs = Json::array();
    for (const auto &d : r.documents) {
        Json dj;
        dj["doc_id"] = d.doc_id;
        dj["domain"] = to_string(d.domain);
        dj["generated"] = d.n_generated;
        dj["reference"] = d.n_reference;
        dj["Rouge-L"] = d.rouge_l;
        dj["Meteor"] = d.meteor;
        dj["BertScore"] = optional_json(d.semantic_f);
        docs.push_back(std::move(dj));
    }
    j["documents"] = std::move(docs);
    j["missing"] = {{"generated", r.missing_generated}, {"reference", r.missing_reference}};
    j["warnings"] = r.warnings;
    return j;
}

// ---------------------------------------------------------------------------
// Position perplexity

inline constexpr int kPplRadius = 3;

struct PplProfile {
    // Index k holds offset k - 3. Offsets -3..-1 are the three sentences before
    // the question (s_{p-2}, s_{p-1}, s_p), 0 is the question, +1..+3 follow it.
    std::array<std::optional<double>, 7> values{};
    std::array<std::size_t, 7> counts{};
    bool clipped_left = false;
    bool clipped_right = false;
    std::size_t n_questions = 0;
};

inline double perplexity(const std::vector<TokenScore> &scores) {
    if (scores.empty())
        throw BackendError(BackendError::Kind::Protocol, "perplexity: scorer returned no tokens");
    double sum = 0;
    for (const auto &s : scores)
        sum += s.logprob;
    return std::exp(-sum / static_cast<double>(scores.size()));
}

// Inserts `question` after sentence p and scores each of the seven elements
// around it, every element conditioned on the three elements before it in the
// augmented sequence (fewer at the document start).
inline PplProfile position_ppl_profile(const Document &doc, std::string_view question, int p, TokenScorer &scorer) {
    const int n = static_cast<int>(doc.size());
    if (p < 1 || p > n)
        throw ValidationError("position_ppl_profile: position " + std::to_string(p) + " outside 1.." + std::to_string(n));
    if (text::trim(question).empty())
        throw ValidationError("position_ppl_profile: empty question");
    std::vector<std::string> seq;
    for (int i = 1; i <= p; ++i)
        seq.push_back(doc.sentence(static_cast<std::size_t>(i)));
    const int q_index = static_cast<int>(seq.size());
    seq.emplace_back(question);
    for (int i = p + 1; i <= n; ++i)
        seq.push_back(doc.sentence(static_cast<std::size_t>(i)));

    PplProfile prof;
    prof.n_questions = 1;
    for (int off = -kPplRadius; off <= kPplRadius; ++off) {
        const int j = q_index + off;
        const auto k = static_cast<std::size_t>(off + kPplRadius);
        if (j < 0) {
            prof.clipped_left = true;
            continue;
        }
        if (j >= static_cast<int>(seq.size())) {
            prof.clipped_right = true;
            continue;
        }
        std::vector<std::string> ctx(seq.begin() + std::max(0, j - 3), seq.begin() + j);
        prof.values[k] = perplexity(scorer.score_tokens(text::join(ctx, " "), seq[static_cast<std::size_t>(j)]));
        prof.counts[k] = 1;
    }
    return prof;
}

// Arithmetic mean per offset over the profiles that have that offset.
inline PplProfile aggregate_profiles(const std::vector<PplProfile> &profiles) {
    PplProfile out;
    for (std::size_t k = 0; k < 7; ++k) {
        std::vector<double> vals;
        for (const auto &p : profiles)
            if (p.values[k])
                vals.push_back(*p.values[k]);
        out.counts[k] = vals.size();
        if (!vals.empty())
            out.values[k] = detail::sorted_mean(vals);
    }
    for (const auto &p : profiles) {
        out.n_questions += p.n_questions;
        out.clipped_left = out.clipped_left || p.clipped_left;
        out.clipped_right = out.clipped_right || p.clipped_right;
    }
    return out;
}

inline Json to_json(const PplProfile &p) {
    Json j;
    Json offsets = Json::array();
    for (std::size_t k = 0; k < 7; ++k)
        offsets.push_back({{"offset", static_cast<int>(k) - kPplRadius},
                           {"ppl", optional_json(p.values[k])},
                           {"count", p.counts[k]}});
    j["offsets"] = std::move(offsets);
    j["n_questions"] = p.n_questions;
    j["clipped_left"] = p.clipped_left;
    j["clipped_right"] = p.clipped_right;
    return j;
}

// ---------------------------------------------------------------------------
// EntScore

struct EntInput {
    std::string doc_id;
    std::string summary;
    std::vector<std::string> answers; // kNoAnswer entries are ignored
};

struct EntResult {
    double score = 0;
    std::vector<std::pair<std::string, double>> per_summary;
    std::vector<std::string> warnings;
};

// Mean over summaries of the mean semantic recall of each answered question's
// answer within the summary.
inline EntResult ent_score(const std::vector<EntInput> &inputs, TokenEmbedder &embedder) {
    EntResult r;
    std::vector<double> per;
    for (const auto &in : inputs) {
        std::vector<double> recalls;
        for (const auto &a : in.answers)
            if (a != kNoAnswer && !text::trim(a).empty())
                recalls.push_back(semantic_score(in.summary, a, embedder).recall);
        if (recalls.empty()) {
            r.warnings.push_back(in.doc_id + ": no answered questions; summary excluded");
            continue;
        }
        double v = detail::sorted_mean(recalls);
        r.per_summary.emplace_back(in.doc_id, v);
        per.push_back(v);
    }
    if (per.empty())
        throw ValidationError("ent_score: no summary has answered questions");
    r.score = detail::sorted_mean(per);
    return r;
}

// ---------------------------------------------------------------------------
// Summary judge

enum class JudgeMetric { Coherence, Consistency, Informativeness };

inline std::string_view to_string(JudgeMetric m) {
    switch (m) {
    case JudgeMetric::Coherence:
        return "Coherence";
    case JudgeMetric::Consistency:
        return "Consistency";
    case JudgeMetric::Informativeness:
        return "Informativeness";
    }
    return "";
}

inline std::optional<JudgeMetric> parse_judge_metric(std::string_view s) {
    for (auto m : {JudgeMetric::Coherence, JudgeMetric::Consistency, JudgeMetric::Informativeness})
        if (text::lowercase(to_string(m)) == text::lowercase(s))
            return m;
    return std::nullopt;
}

inline std::string_view metric_description(JudgeMetric m) {
    switch (m) {
    case JudgeMetric::Coherence:
        return prompt_defaults::kCoherence;
    case JudgeMetric::Consistency:
        return prompt_defaults::kConsistency;
    case JudgeMetric::Informativeness:
        return prompt_defaults::kInformativeness;
    }
    return "";
}

struct JudgeResult {
    std::array<double, 3> scores{};
    std::array<std::string, 3> analyses;
};

namespace detail {

inline double parse_judge_score(std::string_view value, int index, const std::string &raw) {
    static const std::regex num(R"(^\s*\**\s*([0-9]+(?:\.[0-9]+)?))");
    std::string v(value);
    std::smatch m;
    if (!std::regex_search(v, m, num))
        throw ParseError("judge: score " + std::to_string(index) + " is not a number: '" + v + "'", raw);
    double s = std::stod(m[1].str());
    if (s < 1.0 || s > 5.0)
        throw ValidationError("judge: score " + std::to_string(index) + " = " + m[1].str() + " outside 1-5");
    return s;
}

} // namespace detail

inline JudgeResult judge_summaries(const std::string &title, const std::string &article,
                                   const std::vector<std::string> &summaries, JudgeMetric metric,
                                   TextGenerator &backend, const AnnotationOptions &opts = {}) {
    if (summaries.size() != 3)
        throw ValidationError("judge_summaries: exactly three summaries are required");
    auto prompt = render_template(opts.prompts.summary_judge, {{"title", title},
                                                               {"metric", std::string(to_string(metric))},
                                                               {"metric_description", std::string(metric_description(metric))},
                                                               {"article", article},
                                                               {"summary_1", summaries[0]},
                                                               {"summary_2", summaries[1]},
                                                               {"summary_3", summaries[2]}});
    return detail::ask(backend, prompt, opts, [&](const std::string &raw) {
        auto fields = parse_numbered_fields(raw, {"Analysis of summary", "Score for summary"});
        JudgeResult r;
        for (int i = 1; i <= 3; ++i) {
            auto a = fields["Analysis of summary"].find(i);
            if (a == fields["Analysis of summary"].end() || a->second.empty())
                throw ParseError("judge: missing 'Analysis of summary " + std::to_string(i) + ":'", raw);
            auto s = fields["Score for summary"].find(i);
            if (s == fields["Score for summary"].end())
                throw ParseError("judge: missing 'Score for summary " + std::to_string(i) + ":'", raw);
            r.analyses[static_cast<std::size_t>(i - 1)] = a->second;
            r.scores[static_cast<std::size_t>(i - 1)] = detail::parse_judge_score(s->second, i, raw);
        }
        return r;
    });
}

} // namespace gq
