#include "gq/segment.hpp"
#include "support/builders.hpp"
#include "support/synthetic.hpp"

#include <gtest/gtest.h>

using namespace gq;

namespace {

std::vector<std::string> read_lines(const std::string &path) {
    std::vector<std::string> out;
    std::istringstream in(gqtest::read_file(path));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            out.push_back(line);
    return out;
}

std::string joined_words(const std::vector<std::string> &parts) {
    std::string all;
    for (const auto &p : parts)
        all += p + " ";
    return text::normalize_whitespace(all);
}

} // namespace

TEST(Segment, HandSegmentedFixtureMatchesExactly) {
    auto expected = read_lines(std::string(GQ_FIXTURE_DIR) + "/segment_expected.txt");
    ASSERT_EQ(expected.size(), 50u);
    auto got = segment_sentences(gqtest::read_file(std::string(GQ_FIXTURE_DIR) + "/segment_input.txt"));
    EXPECT_EQ(got, expected);
}

TEST(Segment, AbbreviationsDecimalsAndQuotes) {
    EXPECT_EQ(segment_sentences("Dr. Smith arrived. He sat."), (std::vector<std::string>{"Dr. Smith arrived.", "He sat."}));
    EXPECT_EQ(segment_sentences("It costs 3.5 dollars. Cheap!"),
              (std::vector<std::string>{"It costs 3.5 dollars.", "Cheap!"}));
    EXPECT_EQ(segment_sentences("He said \"why not? Go.\" Then left."),
              (std::vector<std::string>{"He said \"why not? Go.\"", "Then left."}));
    EXPECT_EQ(segment_sentences("See J. R. Tolkien for more. Done."),
              (std::vector<std::string>{"See J. R. Tolkien for more.", "Done."}));
    EXPECT_TRUE(segment_sentences(" \n\t ").empty());
    EXPECT_EQ(segment_sentences("No terminal punctuation"), (std::vector<std::string>{"No terminal punctuation"}));
}

TEST(Segment, CustomAbbreviationList) {
    AbbreviationList none(std::vector<std::string>{});
    EXPECT_EQ(segment_sentences("Dr. Smith arrived.", none).size(), 2u);
    AbbreviationList extra(std::vector<std::string>{"Approx."});
    EXPECT_TRUE(extra.contains("approx."));
}

TEST(Segment, AbbreviationFileParsing) {
    gqtest::TempDir dir;
    gqtest::write_file(dir / "abbr.txt", "# comment\n\nfoo.\n  Bar.  \n");
    auto list = AbbreviationList::from_file(dir / "abbr.txt");
    EXPECT_TRUE(list.contains("foo."));
    EXPECT_TRUE(list.contains("bar."));
    EXPECT_FALSE(list.contains("dr."));
    EXPECT_THROW(AbbreviationList::from_file(dir / "missing.txt"), IoError);
}

// Concatenating the sentences reproduces the input modulo whitespace.
TEST(Segment, ReconstructionProperty) {
    for (const auto &art : gqtest::make_corpus(11, 60)) {
        auto got = segment_sentences(art.raw.body_text);
        EXPECT_EQ(joined_words(got), text::normalize_whitespace(art.raw.body_text)) << art.raw.doc_id;
        for (const auto &s : got)
            EXPECT_EQ(s, text::trim(s));
    }
}

TEST(Segment, SyntheticArticlesSplitAsConstructed) {
    for (const auto &art : gqtest::make_corpus(3, 40))
        EXPECT_EQ(segment_sentences(art.raw.body_text), art.sentences) << art.raw.doc_id;
}
