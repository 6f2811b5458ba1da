#include "gq/extraction.hpp"
#include "support/builders.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

using namespace gq;

TEST(Extraction, RecoversEverySyntheticQuestion) {
    for (const auto &art : gqtest::make_corpus(21, 50)) {
        auto doc = extract_questions(art.raw);
        EXPECT_EQ(doc.document.sentences, art.sentences) << art.raw.doc_id;
        EXPECT_EQ(doc.questions, art.questions) << art.raw.doc_id;
    }
}

TEST(Extraction, QuotedQuestionMarkDoesNotCount) {
    RawArticle a{"x", Domain::Textbook, "Plain title", "She asked \"why?\" and left. Then what? Nothing.", {}};
    auto doc = extract_questions(a);
    ASSERT_EQ(doc.questions.size(), 1u);
    EXPECT_EQ(doc.questions[0], (ExtractedQuestion{"Then what?", 2}));
}

TEST(Extraction, TitleQuestionHasIndexZero) {
    RawArticle a{"x", Domain::Scientific, "  Why   bother? ", "Because. Fine.", {}};
    auto doc = extract_questions(a);
    ASSERT_EQ(doc.questions.size(), 1u);
    EXPECT_EQ(doc.questions[0], (ExtractedQuestion{"Why bother?", 0}));
}

TEST(Extraction, FilterKeepsDocsAtThreshold) {
    std::vector<ExtractedDocument> docs(3);
    docs[0].questions.resize(2);
    docs[1].questions.resize(3);
    docs[2].questions.resize(7);
    docs[0].document.doc_id = "a";
    docs[1].document.doc_id = "b";
    docs[2].document.doc_id = "c";
    auto kept = filter_corpus(docs, 3);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].document.doc_id, "b");
    EXPECT_EQ(filter_corpus(docs, 1).size(), 3u);
    EXPECT_THROW(filter_corpus(docs, 0), ValidationError);
}

TEST(Extraction, JsonlRoundTrip) {
    gqtest::TempDir dir;
    std::vector<ExtractedDocument> docs;
    for (const auto &art : gqtest::make_corpus(4, 6))
        docs.push_back(extract_questions(art.raw));
    save_extracted(docs, dir / "x.jsonl");
    EXPECT_EQ(load_extracted(dir / "x.jsonl"), docs);
}

TEST(Relocate, ExactMatchIgnoresWhitespace) {
    auto doc = gqtest::make_doc("d", {"Alpha beta.", "Gamma  delta.", "Alpha beta."});
    EXPECT_EQ(relocate_anchor("Gamma delta.", doc), 2);
    EXPECT_EQ(relocate_anchor("  Alpha\tbeta. ", doc), 1);
}

TEST(Relocate, ParaphraseFallsBackToBm25) {
    auto doc = gqtest::make_doc("d", {"The mitochondria produce energy for the cell.",
                                      "Cells divide through mitosis and meiosis.",
                                      "Plants capture light energy during photosynthesis."});
    EXPECT_EQ(relocate_anchor("cells divide by mitosis", doc), 2);
    EXPECT_EQ(relocate_anchor("photosynthesis captures light", doc), 3);
    EXPECT_THROW(relocate_anchor("   ", doc), ValidationError);
}
