#pragma once

#include "gq/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace gqtest {

inline gq::Document make_doc(std::string id, std::vector<std::string> sentences, std::string title = "A title",
                             gq::Domain domain = gq::Domain::Textbook) {
    gq::Document d;
    d.doc_id = std::move(id);
    d.domain = domain;
    d.title = std::move(title);
    d.sentences = std::move(sentences);
    return d;
}

inline gq::GuidingQuestion make_question(std::string qid, int position, gq::QuestionRole role,
                                         std::string answer = std::string(gq::kNoAnswer),
                                         std::vector<int> evidence = {}) {
    gq::GuidingQuestion q;
    q.qid = std::move(qid);
    q.raw_text = "Why is that?";
    q.completed_text = "Why is that the case?";
    q.position = position;
    q.role = role;
    q.answer = std::move(answer);
    q.evidence_indices = std::move(evidence);
    q.confidence_answer = 4;
    q.confidence_role = 3;
    return q;
}

// n numbered filler sentences.
inline std::vector<std::string> filler(int n, const std::string &stem = "Sentence") {
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i)
        out.push_back(stem + " number " + std::to_string(i) + " is here.");
    return out;
}

class TempDir {
  public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("gq-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }
    const std::filesystem::path &path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path &p, const std::string &content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

} // namespace gqtest
