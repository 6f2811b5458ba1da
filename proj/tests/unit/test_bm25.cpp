#include "gq/bm25.hpp"

#include <gtest/gtest.h>

using namespace gq;

namespace {

// Expected values come from an independent reference computation
// (k1 = 1.5, b = 0.75, idf = ln(1 + (N - df + 0.5) / (df + 0.5))).
const std::vector<std::string> kPassages = {
    "The mitochondria produce energy for the cell.",
    "Cells divide through mitosis and meiosis.",
    "Energy from food is stored as ATP in the cell.",
    "Plants capture light energy during photosynthesis.",
};

constexpr double kTol = 1e-12;

void expect_scores(const Bm25Index &idx, const std::string &q, const std::vector<double> &want) {
    for (std::size_t i = 0; i < want.size(); ++i)
        EXPECT_NEAR(idx.score(q, i), want[i], kTol) << q << " passage " << i;
}

} // namespace

TEST(Bm25, MatchesReferenceScores) {
    Bm25Index idx(kPassages);
    expect_scores(idx, "cell energy", {1.066369233291126, 0, 0.896755275713156, 0.3866756401578781});
    expect_scores(idx, "stored energy in cells",
                  {0.3622967906908315, 1.3052415448767156, 2.361531547131886, 0.3866756401578781});
    expect_scores(idx, "light", {0, 0, 0, 1.3052415448767156});
}

TEST(Bm25, IdfMatchesReference) {
    Bm25Index idx(kPassages);
    EXPECT_NEAR(idx.idf("energy"), 0.3566749439387324, kTol);
    EXPECT_NEAR(idx.idf("the"), 0.6931471805599453, kTol);
    EXPECT_NEAR(idx.idf("zzz"), 2.302585092994046, kTol);
}

TEST(Bm25, BestPicksArgmaxLowestOnTie) {
    Bm25Index idx(kPassages);
    EXPECT_EQ(idx.best("stored energy in cells"), 2u);
    EXPECT_EQ(idx.best("light"), 3u);
    EXPECT_EQ(idx.best("unrelated words"), 0u);
    Bm25Index twins({"same text here", "same text here"});
    EXPECT_EQ(twins.best("text"), 0u);
}

TEST(Bm25, ScoresAreNonNegativeAndCaseInsensitive) {
    Bm25Index idx(kPassages);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        EXPECT_GE(idx.score("the the cell", i), 0.0);
        EXPECT_DOUBLE_EQ(idx.score("CELL Energy", i), idx.score("cell energy", i));
    }
}
