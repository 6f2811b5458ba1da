#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or validation
// error, 2 backend failure.

#include "gq/analysis.hpp"
#include "gq/annotation.hpp"
#include "gq/config.hpp"
#include "gq/datagen.hpp"
#include "gq/extraction.hpp"
#include "gq/generation.hpp"
#include "gq/http_backend.hpp"
#include "gq/metrics.hpp"
#include "gq/simulated_backend.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gq::cli {

namespace fs = std::filesystem;

struct Common {
    std::string config_path;
    std::string backend;
    std::size_t concurrency = 0;
    bool force = false;
    std::string prompts_dir;
};

// Backend handles for one run; stub mode shares a single simulated instance.
struct Backends {
    std::unique_ptr<SimulatedBackend> sim;
    std::unique_ptr<HttpBackend> http_gen, http_score, http_embed;
    TextGenerator *gen = nullptr;
    TokenScorer *scorer = nullptr;
    TokenEmbedder *embedder = nullptr;
};

inline Backends make_backends(const RunConfig &c) {
    Backends b;
    if (c.backend == "stub") {
        b.sim = std::make_unique<SimulatedBackend>(c.finetuned);
        b.gen = b.sim.get();
        b.scorer = b.sim.get();
        b.embedder = b.sim.get();
        return b;
    }
    if (c.api_key.empty())
        throw BackendError(BackendError::Kind::Authentication,
                           "GQ_API_KEY is not set; export it (and GQ_API_BASE / GQ_MODEL) or pass --backend stub");
    auto make = [&](const std::string &model) {
        HttpBackendConfig h;
        h.api_base = c.api_base;
        h.model = model;
        h.api_key = c.api_key;
        h.timeout = std::chrono::seconds(c.timeout_seconds);
        h.max_inflight = c.concurrency;
        return std::make_unique<HttpBackend>(h);
    };
    b.http_gen = make(c.model);
    b.http_score = make(c.scoring_model.empty() ? c.model : c.scoring_model);
    b.http_embed = make(c.embedding_model.empty() ? c.model : c.embedding_model);
    b.gen = b.http_gen.get();
    b.scorer = b.http_score.get();
    b.embedder = b.http_embed.get();
    return b;
}

struct Context {
    RunConfig config;
    PromptSet prompts;
    bool force = false;
    std::string command;
    std::ostream *out = &std::cout;
    std::ostream *err = &std::cerr;

    void guard_output(const fs::path &p) const {
        if (!force && fs::exists(p))
            throw ValidationError("refusing to overwrite " + p.string() + " (pass --force)");
    }

    Json provenance() const {
        Json j;
        j["command"] = command;
        j["config_hash"] = config_hash(config);
        j["backend"] = config.backend;
        j["model"] = config.model;
        return j;
    }

    // Sidecar "<out>.meta.json" next to every JSONL output.
    void write_meta(const fs::path &p) const {
        Json j = provenance();
        j["config"] = to_json(config);
        std::ofstream f(p.string() + ".meta.json", std::ios::binary | std::ios::trunc);
        f << j.dump(2) << '\n';
    }

    void emit_json(const Json &j, const std::string &out_path) const {
        if (out_path.empty()) {
            *out << j.dump(2) << '\n';
            return;
        }
        guard_output(out_path);
        std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write " + out_path);
        f << j.dump(2) << '\n';
    }
};

inline Context make_context(const Common &c, std::string command, std::ostream &out, std::ostream &err) {
    Context ctx;
    ctx.command = std::move(command);
    ctx.out = &out;
    ctx.err = &err;
    if (!c.config_path.empty())
        ctx.config = load_config_file(c.config_path);
    apply_env(ctx.config);
    if (!c.backend.empty())
        ctx.config.backend = c.backend;
    if (c.concurrency > 0)
        ctx.config.concurrency = c.concurrency;
    if (!c.prompts_dir.empty())
        ctx.config.prompts_dir = c.prompts_dir;
    ctx.force = c.force;
    ctx.config.validate();
    ctx.prompts = ctx.config.prompts_dir.empty() ? PromptSet{} : PromptSet::load_dir(ctx.config.prompts_dir);
    return ctx;
}

// Accepts smoothed documents, annotated documents (questions removed without
// smoothing) or bare documents.
inline std::vector<SmoothedDocument> load_question_free(const fs::path &path) {
    std::vector<SmoothedDocument> out;
    read_jsonl(path, [&](const Json &j, const std::string &where) {
        if (j.contains("index_map"))
            out.push_back(smoothed_from_json(j, where));
        else if (j.contains("questions"))
            out.push_back(remove_questions(annotated_from_json(j, where)));
        else {
            AnnotatedDocument a;
            a.document = document_from_json(j, where);
            out.push_back(remove_questions(a));
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct ExtractArgs {
    std::string in, out, abbreviations;
    int min_questions = 0;
};

inline void cmd_extract(const ExtractArgs &a, Context &ctx) {
    ctx.guard_output(a.out);
    auto abbr_path = a.abbreviations.empty() ? ctx.config.abbreviations : a.abbreviations;
    auto abbr = abbr_path.empty() ? AbbreviationList{} : AbbreviationList::from_file(abbr_path);
    if (a.min_questions > 0)
        ctx.config.min_questions = a.min_questions;
    std::vector<ExtractedDocument> docs;
    for (const auto &art : load_raw_articles(a.in))
        docs.push_back(extract_questions(art, abbr));
    auto kept = filter_corpus(docs, ctx.config.min_questions);
    save_extracted(kept, a.out);
    ctx.write_meta(a.out);
    std::size_t nq = 0;
    for (const auto &d : kept)
        nq += d.questions.size();
    *ctx.err << "extract: " << docs.size() << " articles, kept " << kept.size() << " with >= "
             << ctx.config.min_questions << " questions (" << nq << " questions)\n";
}

struct AnnotateArgs {
    std::string in, out, triage_out;
};

inline void cmd_annotate(const AnnotateArgs &a, Context &ctx) {
    ctx.guard_output(a.out);
    if (!a.triage_out.empty())
        ctx.guard_output(a.triage_out);
    auto docs = load_extracted(a.in);
    auto backends = make_backends(ctx.config);
    auto opts = annotation_options(ctx.config, ctx.prompts);
    struct Outcome {
        std::optional<DocumentAnnotation> result;
        std::string failure;
    };
    auto outcomes = parallel_map(docs, ctx.config.concurrency, [&](const ExtractedDocument &d) {
        Outcome o;
        try {
            auto r = annotate_document(d, *backends.gen, opts);
            auto violations = validate_record(r.record);
            if (violations.empty())
                o.result = std::move(r);
            else
                o.failure = d.document.doc_id + ": " + violations.front();
        } catch (const ParseError &e) {
            o.failure = d.document.doc_id + ": " + e.what();
        } catch (const ValidationError &e) {
            o.failure = d.document.doc_id + ": " + e.what();
        }
        return o;
    });
    std::vector<AnnotatedDocument> records;
    std::vector<TriageItem> triage;
    for (auto &o : outcomes) {
        if (!o.result) {
            *ctx.err << "annotate: skipped " << o.failure << "\n";
            continue;
        }
        for (const auto &w : o.result->warnings)
            *ctx.err << "annotate: warning: " << w << "\n";
        records.push_back(std::move(o.result->record));
        triage.insert(triage.end(), o.result->triage.begin(), o.result->triage.end());
    }
    save_corpus(records, a.out);
    ctx.write_meta(a.out);
    if (!a.triage_out.empty()) {
        write_jsonl(a.triage_out, triage, [](const TriageItem &t) { return to_json(t); });
        ctx.write_meta(a.triage_out);
    }
    *ctx.err << "annotate: " << records.size() << " of " << docs.size() << " documents annotated, "
             << review_queue(triage).size() / 2 << " questions flagged for review\n";
}

struct AnalyzeArgs {
    std::string in, out, csv_dir;
};

inline void cmd_analyze(const AnalyzeArgs &a, Context &ctx) {
    auto docs = load_corpus(a.in);
    auto report = analyze(docs);
    auto j = to_json(report);
    j["provenance"] = ctx.provenance();
    if (!a.csv_dir.empty()) {
        fs::create_directories(a.csv_dir);
        for (const auto &[name, table] : to_csv_tables(report)) {
            auto p = fs::path(a.csv_dir) / name;
            ctx.guard_output(p);
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            f << table;
        }
    }
    ctx.emit_json(j, a.out);
}

struct PrepareArgs {
    std::string in, out, docs_out, paradigm = "Joint";
    bool include_title = false;
    std::optional<double> noise_rate;
    std::optional<std::uint64_t> seed;
};

inline void cmd_prepare(const PrepareArgs &a, Context &ctx) {
    auto paradigm = parse_paradigm(a.paradigm);
    if (!paradigm)
        throw ValidationError("unknown paradigm '" + a.paradigm + "' (PP, AE, QG, Multitask, Joint, JointR)");
    if (a.noise_rate)
        ctx.config.noise_rate = *a.noise_rate;
    if (a.seed)
        ctx.config.seed = *a.seed;
    ctx.config.validate();
    ctx.guard_output(a.out);
    if (!a.docs_out.empty())
        ctx.guard_output(a.docs_out);
    auto docs = load_corpus(a.in);
    auto backends = make_backends(ctx.config);
    PrepareOptions popts;
    popts.noise_rate = ctx.config.noise_rate;
    popts.seed = ctx.config.seed;
    popts.annotation = annotation_options(ctx.config, ctx.prompts);
    auto prepared = parallel_map(docs, ctx.config.concurrency,
                                 [&](const AnnotatedDocument &d) { return prepare_document(d, *backends.gen, popts); });
    std::vector<TrainingExample> examples;
    std::vector<SmoothedDocument> smoothed;
    ExampleOptions eopts;
    eopts.include_title = a.include_title;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        for (const auto &w : prepared[i].warnings)
            *ctx.err << "prepare: " << docs[i].document.doc_id << ": " << w << "\n";
        auto ex = make_training_examples(prepared[i].smoothed, docs[i].questions, *paradigm, eopts);
        examples.insert(examples.end(), ex.begin(), ex.end());
        smoothed.push_back(std::move(prepared[i].smoothed));
    }
    write_jsonl(a.out, examples, [](const TrainingExample &e) { return to_json(e); });
    ctx.write_meta(a.out);
    if (!a.docs_out.empty()) {
        write_jsonl(a.docs_out, smoothed, [](const SmoothedDocument &s) { return to_json(s); });
        ctx.write_meta(a.docs_out);
    }
    *ctx.err << "prepare: " << examples.size() << " " << to_string(*paradigm) << " examples from " << docs.size()
             << " documents\n";
}

struct GenerateArgs {
    std::string in, out, paradigm = "JointR";
    std::size_t target = 0;
};

inline void cmd_generate(const GenerateArgs &a, Context &ctx) {
    auto paradigm = parse_gen_paradigm(a.paradigm);
    if (!paradigm)
        throw ValidationError("unknown paradigm '" + a.paradigm + "' (Pipeline, Multitask, Joint, JointR, ZeroShot)");
    ctx.guard_output(a.out);
    auto docs = load_question_free(a.in);
    auto backends = make_backends(ctx.config);
    auto gopts = generation_options(ctx.config, ctx.prompts);
    gopts.concurrency = 1; // documents already run in parallel
    auto sets = parallel_map(docs, ctx.config.concurrency, [&](const SmoothedDocument &s) {
        auto doc = as_document(s);
        auto set = generate_questions(doc, *paradigm, *backends.gen, gopts);
        if (a.target > 0)
            set = control_question_count(std::move(set), a.target, doc, *backends.gen, gopts);
        return set;
    });
    for (const auto &s : sets)
        for (const auto &w : s.warnings)
            *ctx.err << "generate: " << s.doc_id << ": " << w << "\n";
    save_generated(sets, a.out);
    ctx.write_meta(a.out);
}

struct EvaluateArgs {
    std::string gen, ref, out, system = "system";
    bool no_semantic = false;
    bool include_title = false;
};

inline void cmd_evaluate(const EvaluateArgs &a, Context &ctx) {
    auto generated = load_generated(a.gen);
    auto reference = load_corpus(a.ref);
    std::optional<Backends> backends;
    if (!a.no_semantic)
        backends = make_backends(ctx.config);
    EvalOptions eo;
    eo.system = a.system;
    eo.include_title_questions = a.include_title;
    auto rep = evaluate_question_sets(generated, reference, backends ? backends->embedder : nullptr, eo);
    for (const auto &w : rep.warnings)
        *ctx.err << "evaluate: " << w << "\n";
    auto j = to_json(rep);
    j["provenance"] = ctx.provenance();
    ctx.emit_json(j, a.out);
}

struct PplArgs {
    std::string docs, gen, out;
};

inline void cmd_ppl(const PplArgs &a, Context &ctx) {
    auto backends = make_backends(ctx.config);
    std::vector<std::tuple<Document, std::string, int>> jobs;
    if (!a.gen.empty()) {
        std::map<std::string, Document> by_id;
        for (const auto &s : load_question_free(a.docs))
            by_id[s.doc_id] = as_document(s);
        for (const auto &set : load_generated(a.gen)) {
            auto it = by_id.find(set.doc_id);
            if (it == by_id.end()) {
                *ctx.err << "ppl-profile: no document for " << set.doc_id << "\n";
                continue;
            }
            for (const auto &item : set.items)
                if (item.position >= 1 && item.position <= static_cast<int>(it->second.size()))
                    jobs.emplace_back(it->second, item.question, item.position);
        }
    } else {
        for (const auto &d : load_corpus(a.docs)) {
            auto s = remove_questions(d);
            auto doc = as_document(s);
            for (const auto &aq : anchor_questions(s, d.questions))
                if (aq.smoothed_anchor >= 1)
                    jobs.emplace_back(doc, aq.question->completed_text, aq.smoothed_anchor);
        }
    }
    auto profiles = parallel_map(jobs, ctx.config.concurrency, [&](const auto &job) {
        return position_ppl_profile(std::get<0>(job), std::get<1>(job), std::get<2>(job), *backends.scorer);
    });
    auto j = to_json(aggregate_profiles(profiles));
    j["provenance"] = ctx.provenance();
    ctx.emit_json(j, a.out);
}

struct EntArgs {
    std::string summaries, ref, out;
};

inline void cmd_entscore(const EntArgs &a, Context &ctx) {
    std::map<std::string, std::vector<std::string>> answers;
    for (const auto &d : load_corpus(a.ref))
        for (const auto &q : d.questions)
            answers[d.document.doc_id].push_back(q.answer);
    std::vector<EntInput> inputs;
    read_jsonl(a.summaries, [&](const Json &j, const std::string &where) {
        EntInput in;
        in.doc_id = detail::require_field<std::string>(j, "doc_id", where);
        in.summary = detail::require_field<std::string>(j, "summary", where);
        auto it = answers.find(in.doc_id);
        if (it == answers.end())
            throw ValidationError(where + ": no reference document '" + in.doc_id + "'");
        in.answers = it->second;
        inputs.push_back(std::move(in));
    });
    auto backends = make_backends(ctx.config);
    auto r = ent_score(inputs, *backends.embedder);
    for (const auto &w : r.warnings)
        *ctx.err << "entscore: " << w << "\n";
    Json j;
    j["EntScore"] = r.score;
    j["summaries"] = Json::array();
    for (const auto &[id, v] : r.per_summary)
        j["summaries"].push_back({{"doc_id", id}, {"score", v}});
    j["provenance"] = ctx.provenance();
    ctx.emit_json(j, a.out);
}

struct JudgeArgs {
    std::string in, out, metric = "Coherence";
};

inline void cmd_judge(const JudgeArgs &a, Context &ctx) {
    auto metric = parse_judge_metric(a.metric);
    if (!metric)
        throw ValidationError("unknown metric '" + a.metric + "' (Coherence, Consistency, Informativeness)");
    if (!a.out.empty())
        ctx.guard_output(a.out);
    struct Job {
        std::string id, title, article;
        std::vector<std::string> summaries;
    };
    std::vector<Job> jobs;
    read_jsonl(a.in, [&](const Json &j, const std::string &where) {
        Job job;
        job.id = j.value("id", where);
        job.title = detail::require_field<std::string>(j, "title", where);
        job.article = detail::require_field<std::string>(j, "article", where);
        job.summaries = detail::require_field<std::vector<std::string>>(j, "summaries", where);
        if (job.summaries.size() != 3)
            throw ValidationError(where + ": 'summaries' must hold exactly three entries");
        jobs.push_back(std::move(job));
    });
    auto backends = make_backends(ctx.config);
    auto opts = annotation_options(ctx.config, ctx.prompts);
    auto results = parallel_map(jobs, ctx.config.concurrency, [&](const Job &job) {
        return judge_summaries(job.title, job.article, job.summaries, *metric, *backends.gen, opts);
    });
    std::vector<Json> lines;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        Json j;
        j["id"] = jobs[i].id;
        j["metric"] = to_string(*metric);
        j["scores"] = results[i].scores;
        j["analyses"] = results[i].analyses;
        lines.push_back(std::move(j));
    }
    if (a.out.empty()) {
        for (const auto &j : lines)
            *ctx.out << j.dump() << '\n';
    } else {
        write_jsonl(a.out, lines, [](const Json &j) { return j; });
        ctx.write_meta(a.out);
    }
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    CLI::App app{"Guiding-question corpus construction, generation and evaluation", "gq"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", common.config_path, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--backend", common.backend, "stub or http (default from config: stub)")
            ->check(CLI::IsMember({"stub", "http"}));
        sub->add_option("--concurrency", common.concurrency, "parallel documents / requests (default 4)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--force", common.force, "overwrite existing outputs");
        sub->add_option("--prompts-dir", common.prompts_dir, "directory of prompt template overrides")
            ->check(CLI::ExistingDirectory);
    };

    ExtractArgs ex;
    auto *c_extract = app.add_subcommand("extract", "segment raw articles and mine their questions");
    c_extract->add_option("--in", ex.in, "raw article JSONL")->required()->check(CLI::ExistingFile);
    c_extract->add_option("--out", ex.out, "extracted document JSONL")->required();
    c_extract->add_option("--min-questions", ex.min_questions, "keep documents with at least this many questions");
    c_extract->add_option("--abbreviations", ex.abbreviations, "abbreviation list, one per line")
        ->check(CLI::ExistingFile);
    add_common(c_extract);

    AnnotateArgs an;
    auto *c_annotate = app.add_subcommand("annotate", "complete, answer, ground and role-label questions");
    c_annotate->add_option("--in", an.in, "extracted document JSONL")->required()->check(CLI::ExistingFile);
    c_annotate->add_option("--out", an.out, "annotated corpus JSONL")->required();
    c_annotate->add_option("--triage-out", an.triage_out, "confidence triage JSONL");
    add_common(c_annotate);

    AnalyzeArgs az;
    auto *c_analyze = app.add_subcommand("analyze", "corpus statistics and role distributions");
    c_analyze->add_option("--in", az.in, "annotated corpus JSONL")->required()->check(CLI::ExistingFile);
    c_analyze->add_option("--out", az.out, "report JSON (default: stdout)");
    c_analyze->add_option("--csv-dir", az.csv_dir, "also write CSV tables here");
    add_common(c_analyze);

    PrepareArgs pr;
    auto *c_prepare = app.add_subcommand("prepare", "build question-free documents and training examples");
    c_prepare->add_option("--in", pr.in, "annotated corpus JSONL")->required()->check(CLI::ExistingFile);
    c_prepare->add_option("--out", pr.out, "training example JSONL")->required();
    c_prepare->add_option("--docs-out", pr.docs_out, "smoothed document JSONL");
    c_prepare->add_option("--paradigm", pr.paradigm, "PP, AE, QG, Multitask, Joint or JointR");
    c_prepare->add_flag("--include-title", pr.include_title, "also train on title questions");
    c_prepare->add_option("--noise-rate", pr.noise_rate, "share of sentences removed as noise");
    c_prepare->add_option("--seed", pr.seed, "noise selection seed");
    add_common(c_prepare);

    GenerateArgs ge;
    auto *c_generate = app.add_subcommand("generate", "generate guiding questions for documents");
    c_generate->add_option("--in", ge.in, "document JSONL (smoothed, annotated or bare)")
        ->required()
        ->check(CLI::ExistingFile);
    c_generate->add_option("--out", ge.out, "generated question set JSONL")->required();
    c_generate->add_option("--paradigm", ge.paradigm, "Pipeline, Multitask, Joint, JointR or ZeroShot");
    c_generate->add_option("--target", ge.target, "truncate or extend each set to this many questions");
    add_common(c_generate);

    EvaluateArgs ev;
    auto *c_evaluate = app.add_subcommand("evaluate", "score generated sets against references");
    c_evaluate->add_option("--gen", ev.gen, "generated question set JSONL")->required()->check(CLI::ExistingFile);
    c_evaluate->add_option("--ref", ev.ref, "annotated corpus JSONL")->required()->check(CLI::ExistingFile);
    c_evaluate->add_option("--out", ev.out, "report JSON (default: stdout)");
    c_evaluate->add_option("--system", ev.system, "system name in the report");
    c_evaluate->add_flag("--no-semantic", ev.no_semantic, "skip the embedding-based score");
    c_evaluate->add_flag("--include-title", ev.include_title, "keep title questions in the references");
    add_common(c_evaluate);

    PplArgs pp;
    auto *c_ppl = app.add_subcommand("ppl-profile", "perplexity around inserted questions");
    c_ppl->add_option("--docs", pp.docs, "annotated corpus, or documents when --gen is given")
        ->required()
        ->check(CLI::ExistingFile);
    c_ppl->add_option("--gen", pp.gen, "generated question set JSONL")->check(CLI::ExistingFile);
    c_ppl->add_option("--out", pp.out, "profile JSON (default: stdout)");
    add_common(c_ppl);

    EntArgs en;
    auto *c_ent = app.add_subcommand("entscore", "answer coverage of reader summaries");
    c_ent->add_option("--summaries", en.summaries, "JSONL of {doc_id, summary}")->required()->check(CLI::ExistingFile);
    c_ent->add_option("--ref", en.ref, "annotated corpus JSONL")->required()->check(CLI::ExistingFile);
    c_ent->add_option("--out", en.out, "result JSON (default: stdout)");
    add_common(c_ent);

    JudgeArgs ju;
    auto *c_judge = app.add_subcommand("judge", "LLM rating of summary triples");
    c_judge->add_option("--in", ju.in, "JSONL of {id, title, article, summaries[3]}")->required()->check(CLI::ExistingFile);
    c_judge->add_option("--metric", ju.metric, "Coherence, Consistency or Informativeness");
    c_judge->add_option("--out", ju.out, "result JSONL (default: stdout)");
    add_common(c_judge);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, err, err);
        err << app.help();
        return 1;
    }

    try {
        auto *sub = app.get_subcommands().front();
        auto ctx = make_context(common, sub->get_name(), out, err);
        if (sub == c_extract)
            cmd_extract(ex, ctx);
        else if (sub == c_annotate)
            cmd_annotate(an, ctx);
        else if (sub == c_analyze)
            cmd_analyze(az, ctx);
        else if (sub == c_prepare)
            cmd_prepare(pr, ctx);
        else if (sub == c_generate)
            cmd_generate(ge, ctx);
        else if (sub == c_evaluate)
            cmd_evaluate(ev, ctx);
        else if (sub == c_ppl)
            cmd_ppl(pp, ctx);
        else if (sub == c_ent)
            cmd_entscore(en, ctx);
        else if (sub == c_judge)
            cmd_judge(ju, ctx);
    } catch (const BackendError &e) {
        err << "gq: backend error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return 2;
    } catch (const ParseError &e) {
        err << "gq: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        err << "gq: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace gq::cli
