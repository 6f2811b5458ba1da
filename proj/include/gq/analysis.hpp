#pragma once

// Distributional reports over an annotated corpus.

#include "gq/corpus.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace gq {

using RoleProportions = std::map<QuestionRole, double>;
using Quintiles = std::array<double, 5>;

struct RoleDistance {
    double mean = 0;
    std::size_t count = 0;
};

struct AnalysisReport {
    std::vector<CorpusStats> corpus_stats;                  // one row per domain present
    std::map<Domain, RoleProportions> role_distribution;
    std::map<Domain, std::array<double, 5>> role_diversity; // index k-1: share of docs with k distinct roles
    std::map<QuestionRole, Quintiles> position_quintiles;
    std::map<QuestionRole, RoleDistance> evidence_distance;
};

inline std::vector<Domain> domains_present(const std::vector<AnnotatedDocument> &docs) {
    std::set<Domain> seen;
    for (const auto &d : docs)
        seen.insert(d.document.domain);
    return {seen.begin(), seen.end()};
}

inline std::vector<CorpusStats> corpus_stats(const std::vector<AnnotatedDocument> &docs) {
    if (docs.empty())
        throw ValidationError("corpus_stats: empty dataset");
    std::vector<CorpusStats> out;
    for (auto d : domains_present(docs))
        out.push_back(compute_corpus_stats(docs, d));
    return out;
}

inline std::map<Domain, RoleProportions> role_distribution(const std::vector<AnnotatedDocument> &docs) {
    std::map<Domain, std::map<QuestionRole, std::size_t>> counts;
    std::map<Domain, std::size_t> totals;
    for (const auto &d : docs)
        for (const auto &q : d.questions) {
            ++counts[d.document.domain][q.role];
            ++totals[d.document.domain];
        }
    std::map<Domain, RoleProportions> out;
    for (const auto &[dom, per_role] : counts)
        for (const auto &[role, c] : per_role)
            out[dom][role] = static_cast<double>(c) / static_cast<double>(totals[dom]);
    return out;
}

// Documents without questions are left out.
inline std::map<Domain, std::array<double, 5>> role_diversity(const std::vector<AnnotatedDocument> &docs) {
    std::map<Domain, std::array<std::size_t, 5>> counts;
    std::map<Domain, std::size_t> totals;
    for (const auto &d : docs) {
        std::set<QuestionRole> roles;
        for (const auto &q : d.questions)
            roles.insert(q.role);
        if (roles.empty())
            continue;
        ++counts[d.document.domain][roles.size() - 1];
        ++totals[d.document.domain];
    }
    std::map<Domain, std::array<double, 5>> out;
    for (const auto &[dom, c] : counts)
        for (std::size_t k = 0; k < 5; ++k)
            out[dom][k] = static_cast<double>(c[k]) / static_cast<double>(totals[dom]);
    return out;
}

// Bin of position p in a document of n sentences: ceil(5p / n), in 1..5.
inline int quintile_bin(int p, int n) {
    if (n < 1 || p < 1 || p > n)
        throw ValidationError("quintile_bin: need 1 <= p <= n");
    return (5 * p + n - 1) / n;
}

// Title questions are excluded.
inline std::map<QuestionRole, Quintiles> position_quintiles(const std::vector<AnnotatedDocument> &docs) {
    std::map<QuestionRole, std::array<std::size_t, 5>> counts;
    std::map<QuestionRole, std::size_t> totals;
    for (const auto &d : docs) {
        const int n = static_cast<int>(d.document.size());
        for (const auto &q : d.questions) {
            if (q.position == 0 || q.role == QuestionRole::ArouseInterest)
                continue;
            ++counts[q.role][static_cast<std::size_t>(quintile_bin(q.position, n) - 1)];
            ++totals[q.role];
        }
    }
    std::map<QuestionRole, Quintiles> out;
    for (const auto &[role, c] : counts)
        for (std::size_t k = 0; k < 5; ++k)
            out[role][k] = static_cast<double>(c[k]) / static_cast<double>(totals[role]);
    return out;
}

// |farthest evidence index - position| per question; questions without
// evidence are excluded.
inline std::optional<int> farthest_evidence_distance(const GuidingQuestion &q) {
    if (q.evidence_indices.empty())
        return std::nullopt;
    int best = 0;
    for (int e : q.evidence_indices)
        best = std::max(best, std::abs(e - q.position));
    return best;
}

inline std::map<QuestionRole, RoleDistance> evidence_distance(const std::vector<AnnotatedDocument> &docs) {
    std::map<QuestionRole, std::pair<long long, std::size_t>> acc;
    for (const auto &d : docs)
        for (const auto &q : d.questions)
            if (auto dist = farthest_evidence_distance(q)) {
                acc[q.role].first += *dist;
                ++acc[q.role].second;
            }
    std::map<QuestionRole, RoleDistance> out;
    for (const auto &[role, a] : acc)
        out[role] = {static_cast<double>(a.first) / static_cast<double>(a.second), a.second};
    return out;
}

inline AnalysisReport analyze(const std::vector<AnnotatedDocument> &docs) {
    return {corpus_stats(docs), role_distribution(docs), role_diversity(docs), position_quintiles(docs),
            evidence_distance(docs)};
}

inline Json to_json(const AnalysisReport &r) {
    Json j;
    j["corpus_stats"] = Json::array();
    for (const auto &s : r.corpus_stats)
        j["corpus_stats"].push_back(to_json(s));
    Json dist = Json::object();
    for (const auto &[dom, props] : r.role_distribution) {
        Json row = Json::object();
        for (auto role : kAllRoles)
            row[std::string(to_string(role))] = props.count(role) ? props.at(role) : 0.0;
        dist[std::string(to_string(dom))] = std::move(row);
    }
    j["role_distribution"] = std::move(dist);
    Json div = Json::object();
    for (const auto &[dom, props] : r.role_diversity) {
        Json row = Json::object();
        for (std::size_t k = 0; k < 5; ++k)
            row[std::to_string(k + 1)] = props[k];
        div[std::string(to_string(dom))] = std::move(row);
    }
    j["role_diversity"] = std::move(div);
    Json quint = Json::object();
    for (const auto &[role, q] : r.position_quintiles)
        quint[std::string(to_string(role))] = q;
    j["position_quintiles"] = std::move(quint);
    Json ev = Json::object();
    for (const auto &[role, d] : r.evidence_distance)
        ev[std::string(to_string(role))] = {{"mean", d.mean}, {"count", d.count}};
    j["evidence_distance"] = std::move(ev);
    return j;
}

// CSV tables keyed by file name.
inline std::map<std::string, std::string> to_csv_tables(const AnalysisReport &r) {
    std::map<std::string, std::string> out;
    auto num = [](double v) {
        std::ostringstream s;
        s.precision(10);
        s << v;
        return s.str();
    };
    {
        std::string t = "domain,n_documents,avg_words_per_doc,n_questions,avg_words_per_question,avg_questions_per_doc\n";
        for (const auto &s : r.corpus_stats)
            t += std::string(to_string(s.domain)) + "," + num(s.n_documents) + "," + num(s.avg_words_per_doc) + "," +
                 num(s.n_questions) + "," + num(s.avg_words_per_question) + "," + num(s.avg_questions_per_doc) + "\n";
        out["corpus_stats.csv"] = t;
    }
    {
        std::string t = "domain,role,proportion\n";
        for (const auto &[dom, props] : r.role_distribution)
            for (auto role : kAllRoles)
                t += std::string(to_string(dom)) + "," + std::string(to_string(role)) + "," +
                     num(props.count(role) ? props.at(role) : 0.0) + "\n";
        out["role_distribution.csv"] = t;
    }
    {
        std::string t = "domain,unique_roles,proportion\n";
        for (const auto &[dom, props] : r.role_diversity)
            for (std::size_t k = 0; k < 5; ++k)
                t += std::string(to_string(dom)) + "," + std::to_string(k + 1) + "," + num(props[k]) + "\n";
        out["role_diversity.csv"] = t;
    }
    {
        std::string t = "role,q1,q2,q3,q4,q5\n";
        for (const auto &[role, q] : r.position_quintiles) {
            t += std::string(to_string(role));
            for (double v : q)
                t += "," + num(v);
            t += "\n";
        }
        out["position_quintiles.csv"] = t;
    }
    {
        std::string t = "role,mean_distance,count\n";
        for (const auto &[role, d] : r.evidence_distance)
            t += std::string(to_string(role)) + "," + num(d.mean) + "," + std::to_string(d.count) + "\n";
        out["evidence_distance.csv"] = t;
    }
    return out;
}

} // namespace gq
