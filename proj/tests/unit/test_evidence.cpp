#include "gq/evidence.hpp"
#include "gq/keywords.hpp"
#include "support/builders.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gq;

namespace {

const std::vector<std::string> kWords = {"cell", "energy", "light", "plant", "water", "sugar", "root", "leaf", "sun", "air"};

Document random_doc(std::mt19937_64 &rng, int n) {
    std::vector<std::string> sents;
    for (int i = 0; i < n; ++i) {
        std::string s;
        int len = 3 + static_cast<int>(rng() % 6);
        for (int w = 0; w < len; ++w)
            s += kWords[rng() % kWords.size()] + " ";
        sents.push_back(s + ".");
    }
    return gqtest::make_doc("r", sents);
}

} // namespace

TEST(Evidence, IdentityAnswerSelectsItsSentence) {
    auto doc = gqtest::make_doc("d", {"Roots absorb water from soil.", "Leaves make sugar using light.", "Stems carry both."});
    auto r = extract_evidence("Leaves make sugar using light.", doc);
    EXPECT_EQ(r.indices, std::vector<int>{2});
    EXPECT_DOUBLE_EQ(r.score, 1.0);
}

TEST(Evidence, NoAnswerIsRejected) {
    auto doc = gqtest::make_doc("d", {"A."});
    EXPECT_THROW(extract_evidence(kNoAnswer, doc), ValidationError);
    EXPECT_THROW(brute_force_evidence(kNoAnswer, doc), ValidationError);
}

TEST(Evidence, ExcludedSentencesAreNeverChosen) {
    auto doc = gqtest::make_doc("d", {"Leaves make sugar.", "Leaves make sugar."});
    EvidenceOptions opts;
    opts.excluded = {1};
    EXPECT_EQ(extract_evidence("Leaves make sugar.", doc, opts).indices, std::vector<int>{2});
}

TEST(Evidence, GreedyNeverBeatsBruteForceAndTraceIncreases) {
    std::mt19937_64 rng(99);
    for (auto objective : {EvidenceObjective::Rouge12Mean, EvidenceObjective::RougeL}) {
        for (int trial = 0; trial < 40; ++trial) {
            auto doc = random_doc(rng, 3 + static_cast<int>(rng() % 8));
            std::string answer;
            for (int w = 0; w < 6; ++w)
                answer += kWords[rng() % kWords.size()] + " ";
            EvidenceOptions opts;
            opts.objective = objective;
            opts.max_sentences = 1 + static_cast<int>(rng() % 4);
            auto greedy = extract_evidence(answer, doc, opts);
            auto exact = brute_force_evidence(answer, doc, opts);
            EXPECT_LE(greedy.score, exact.score + 1e-12);
            EXPECT_LE(static_cast<int>(greedy.indices.size()), opts.max_sentences);
            EXPECT_TRUE(std::is_sorted(greedy.indices.begin(), greedy.indices.end()));
            double prev = 0;
            for (const auto &[idx, score] : greedy.trace) {
                EXPECT_GT(score, prev);
                prev = score;
            }
            EvidenceScorer scorer(answer, doc, objective);
            EXPECT_NEAR(scorer(greedy.indices), greedy.score, 1e-12);
        }
    }
}

TEST(Keywords, RanksByTfIdfAndDropsStopwords) {
    std::vector<std::string> collection = {"The cell uses energy.", "Energy flows in the plant.", "Chlorophyll absorbs light."};
    auto r = extract_answer_keywords({"Chlorophyll absorbs light energy."}, collection, 3);
    ASSERT_EQ(r.keywords.size(), 3u);
    EXPECT_EQ(r.keywords[0], "Chlorophyll");
    EXPECT_EQ(r.keywords[1], "absorbs");
    EXPECT_EQ(r.keywords[2], "light");
    EXPECT_TRUE(std::is_sorted(r.scores.rbegin(), r.scores.rend()));
    for (const auto &k : r.keywords)
        EXPECT_FALSE(text::is_stopword(text::lowercase(k)));
}

TEST(Keywords, StopwordOnlyEvidenceWarns) {
    auto r = extract_answer_keywords({"the of and"}, {"the of and"});
    EXPECT_TRUE(r.keywords.empty());
    EXPECT_EQ(r.warnings.size(), 1u);
    EXPECT_THROW(extract_answer_keywords({}, {"x"}), ValidationError);
}

TEST(Keywords, IdfIsSmoothed) {
    IdfTable idf({"a b", "a c"});
    EXPECT_NEAR(idf("a"), std::log(3.0 / 3.0) + 1.0, 1e-15);
    EXPECT_NEAR(idf("b"), std::log(3.0 / 2.0) + 1.0, 1e-15);
    EXPECT_NEAR(idf("zz"), std::log(3.0) + 1.0, 1e-15);
}
