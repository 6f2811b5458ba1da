#pragma once

// Run configuration: JSON file, then GQ_* environment variables, then flags.

#include "gq/corpus.hpp"
#include "gq/datagen.hpp"
#include "gq/generation.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

namespace gq {

struct RunConfig {
    std::string backend = "stub"; // "stub" or "http"
    std::string api_base = "http://localhost:8000/v1";
    std::string model;
    std::string api_key; // never serialized or hashed
    std::string scoring_model;
    std::string embedding_model;
    FinetunedModels finetuned;
    double annotation_temperature = 0.2;
    double generation_temperature = 0.0;
    std::uint64_t seed = 13;
    double noise_rate = 0.01;
    int triage_threshold = 1;
    int max_reasks = 2;
    int min_questions = 3;
    int evidence_max_sentences = 5;
    int keywords_k = 8;
    int context_radius = 5;
    int smoothing_radius = 5;
    std::size_t max_context_tokens = 0;
    std::size_t concurrency = 4;
    int timeout_seconds = 120;
    std::string prompts_dir;
    std::string abbreviations;

    void validate() const {
        auto fail = [](const std::string &m) { throw ValidationError("config: " + m); };
        if (backend != "stub" && backend != "http")
            fail("backend must be 'stub' or 'http', got '" + backend + "'");
        if (annotation_temperature < 0 || annotation_temperature > 2 || generation_temperature < 0 ||
            generation_temperature > 2)
            fail("temperatures must lie in [0, 2]");
        if (noise_rate < 0 || noise_rate > 1)
            fail("noise_rate must lie in [0, 1]");
        if (triage_threshold < 1 || triage_threshold > 5)
            fail("triage_threshold must lie in 1-5");
        if (max_reasks < 0)
            fail("max_reasks must be >= 0");
        if (min_questions < 1)
            fail("min_questions must be >= 1");
        if (evidence_max_sentences < 1 || keywords_k < 1)
            fail("evidence_max_sentences and keywords_k must be >= 1");
        if (context_radius < 0 || smoothing_radius < 1)
            fail("context_radius must be >= 0 and smoothing_radius >= 1");
        if (concurrency < 1)
            fail("concurrency must be >= 1");
        if (timeout_seconds < 1)
            fail("timeout_seconds must be >= 1");
        if (backend == "http" && api_base.find("://") == std::string::npos)
            fail("api_base must include a scheme");
    }
};

inline Json to_json(const RunConfig &c) {
    Json j;
    j["backend"] = c.backend;
    j["api_base"] = c.api_base;
    j["model"] = c.model;
    j["scoring_model"] = c.scoring_model;
    j["embedding_model"] = c.embedding_model;
    j["finetuned"] = {{"pp", c.finetuned.pp},     {"ae", c.finetuned.ae},
                      {"qg", c.finetuned.qg},     {"multitask", c.finetuned.multitask},
                      {"joint", c.finetuned.joint}, {"jointr", c.finetuned.jointr}};
    j["annotation_temperature"] = c.annotation_temperature;
    j["generation_temperature"] = c.generation_temperature;
    j["seed"] = c.seed;
    j["noise_rate"] = c.noise_rate;
    j["triage_threshold"] = c.triage_threshold;
    j["max_reasks"] = c.max_reasks;
    j["min_questions"] = c.min_questions;
    j["evidence_max_sentences"] = c.evidence_max_sentences;
    j["keywords_k"] = c.keywords_k;
    j["context_radius"] = c.context_radius;
    j["smoothing_radius"] = c.smoothing_radius;
    j["max_context_tokens"] = c.max_context_tokens;
    j["concurrency"] = c.concurrency;
    j["timeout_seconds"] = c.timeout_seconds;
    j["prompts_dir"] = c.prompts_dir;
    j["abbreviations"] = c.abbreviations;
    return j;
}

namespace detail {

template <typename T>
void read_opt(const Json &j, const char *key, T &slot) {
    if (!j.contains(key))
        return;
    try {
        slot = j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ValidationError(std::string("config: field '") + key + "' has the wrong type");
    }
}

} // namespace detail

// Unknown keys are rejected so typos do not silently fall back to defaults.
inline RunConfig config_from_json(const Json &j, RunConfig c = {}) {
    if (!j.is_object())
        throw ValidationError("config: top level must be an object");
    static const std::set<std::string> known = {
        "backend", "api_base", "model", "scoring_model", "embedding_model", "finetuned", "annotation_temperature",
        "generation_temperature", "seed", "noise_rate", "triage_threshold", "max_reasks", "min_questions",
        "evidence_max_sentences", "keywords_k", "context_radius", "smoothing_radius", "max_context_tokens",
        "concurrency", "timeout_seconds", "prompts_dir", "abbreviations"};
    for (const auto &[k, v] : j.items())
        if (!known.count(k))
            throw ValidationError("config: unknown field '" + k + "'");
    detail::read_opt(j, "backend", c.backend);
    detail::read_opt(j, "api_base", c.api_base);
    detail::read_opt(j, "model", c.model);
    detail::read_opt(j, "scoring_model", c.scoring_model);
    detail::read_opt(j, "embedding_model", c.embedding_model);
    if (j.contains("finetuned")) {
        const auto &f = j["finetuned"];
        detail::read_opt(f, "pp", c.finetuned.pp);
        detail::read_opt(f, "ae", c.finetuned.ae);
        detail::read_opt(f, "qg", c.finetuned.qg);
        detail::read_opt(f, "multitask", c.finetuned.multitask);
        detail::read_opt(f, "joint", c.finetuned.joint);
        detail::read_opt(f, "jointr", c.finetuned.jointr);
    }
    detail::read_opt(j, "annotation_temperature", c.annotation_temperature);
    detail::read_opt(j, "generation_temperature", c.generation_temperature);
    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "noise_rate", c.noise_rate);
    detail::read_opt(j, "triage_threshold", c.triage_threshold);
    detail::read_opt(j, "max_reasks", c.max_reasks);
    detail::read_opt(j, "min_questions", c.min_questions);
    detail::read_opt(j, "evidence_max_sentences", c.evidence_max_sentences);
    detail::read_opt(j, "keywords_k", c.keywords_k);
    detail::read_opt(j, "context_radius", c.context_radius);
    detail::read_opt(j, "smoothing_radius", c.smoothing_radius);
    detail::read_opt(j, "max_context_tokens", c.max_context_tokens);
    detail::read_opt(j, "concurrency", c.concurrency);
    detail::read_opt(j, "timeout_seconds", c.timeout_seconds);
    detail::read_opt(j, "prompts_dir", c.prompts_dir);
    detail::read_opt(j, "abbreviations", c.abbreviations);
    return c;
}

inline RunConfig load_config_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline void apply_env(RunConfig &c) {
    if (const char *v = std::getenv("GQ_API_BASE"); v && *v)
        c.api_base = v;
    if (const char *v = std::getenv("GQ_MODEL"); v && *v)
        c.model = v;
    if (const char *v = std::getenv("GQ_API_KEY"); v && *v)
        c.api_key = v;
}

// FNV-1a 64 over the serialized config, as 16 hex digits.
inline std::string config_hash(const RunConfig &c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(to_json(c).dump())));
    return buf;
}

inline AnnotationOptions annotation_options(const RunConfig &c, const PromptSet &prompts) {
    AnnotationOptions o;
    o.temperature = c.annotation_temperature;
    o.max_reasks = c.max_reasks;
    o.context_radius = c.context_radius;
    o.smoothing_radius = c.smoothing_radius;
    o.evidence_max_sentences = c.evidence_max_sentences;
    o.keywords_k = static_cast<std::size_t>(c.keywords_k);
    o.triage_threshold = c.triage_threshold;
    o.prompts = prompts;
    return o;
}

inline GenerationOptions generation_options(const RunConfig &c, const PromptSet &prompts) {
    GenerationOptions o;
    o.models = c.finetuned;
    o.zero_shot_model = c.model;
    o.temperature = c.generation_temperature;
    o.concurrency = c.concurrency;
    o.max_context_tokens = c.max_context_tokens;
    o.prompts = prompts;
    return o;
}

} // namespace gq
