#include "gq/datagen.hpp"
#include "gq/simulated_backend.hpp"
#include "support/builders.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gq;
using gqtest::make_question;

namespace {

AnnotatedDocument small_record() {
    AnnotatedDocument a;
    a.document = gqtest::make_doc("d", {"Plants need light.", "Why?", "Leaves turn to the sun.", "Roots absorb water.",
                                        "How much water?", "What about soil?", "Soil holds the water."},
                                  "Why plants?");
    a.questions.push_back(make_question("q0", 0, QuestionRole::ArouseInterest));
    a.questions.push_back(make_question("q1", 2, QuestionRole::EstablishClaim, "They turn.", {3}));
    a.questions.push_back(make_question("q2", 5, QuestionRole::FramePurpose, "A lot.", {4}));
    a.questions.push_back(make_question("q3", 6, QuestionRole::ProvokeThought));
    a.questions[1].completed_text = "Why do plants need light?";
    a.questions[1].answer_keywords = {"Leaves", "sun"};
    a.questions[2].completed_text = "How much water do roots take?";
    a.questions[2].answer_keywords = {"water"};
    a.questions[3].completed_text = "What about soil?";
    return a;
}

std::string random_text(std::mt19937_64 &rng) {
    static const std::string alphabet = "ab #|,\\?.";
    std::string s;
    int len = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i)
        s.push_back(alphabet[rng() % alphabet.size()]);
    return s;
}

} // namespace

TEST(JointFormat, ExactSerialization) {
    std::vector<JointEntry> es = {{"Plants need light.", QuestionRole::EstablishClaim, {"Leaves", "sun"}, "Why?"},
                                  {"A # b | c, d", QuestionRole::ProvokeThought, {"x, y"}, "Really?"}};
    EXPECT_EQ(flatten_joint(es, false), "Position: Plants need light. # Answer: Leaves, sun # Question: Why? | "
                                        "Position: A \\# b \\| c, d # Answer: x\\, y # Question: Really?");
    EXPECT_EQ(flatten_joint({es[0]}, true),
              "Position: Plants need light. # Role: EstablishClaim # Answer: Leaves, sun # Question: Why?");
    EXPECT_THROW(flatten_joint({}, false), ValidationError);
    es[0].role.reset();
    EXPECT_THROW(flatten_joint(es, true), ValidationError);
}

TEST(JointFormat, RoundTripProperty) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const bool with_roles = trial % 2 == 0;
        std::vector<JointEntry> es;
        int n = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) {
            JointEntry e;
            e.anchor_sentence = std::string(text::trim("S" + random_text(rng)));
            if (with_roles)
                e.role = kAllRoles[1 + rng() % 4];
            int k = static_cast<int>(rng() % 3);
            for (int j = 0; j < k; ++j)
                e.answer_keywords.push_back(std::string(text::trim("k" + random_text(rng))));
            e.question = std::string(text::trim("Q" + random_text(rng))) + "?";
            es.push_back(e);
        }
        auto flat = flatten_joint(es, with_roles);
        EXPECT_EQ(parse_joint(flat, with_roles), es) << flat;
    }
}

TEST(JointFormat, StrictRejectsWhatTolerantSkips) {
    const std::string input =
        "Position: a. # Answer: x # Question: Why? | Position: b. # Question: no answer field? | "
        "Position: c. # Answer: y # Question: How?";
    auto outcome = parse_joint_records(input, false);
    ASSERT_EQ(outcome.entries.size(), 2u);
    EXPECT_EQ(outcome.entries[1].anchor_sentence, "c.");
    ASSERT_EQ(outcome.errors.size(), 1u);
    EXPECT_EQ(outcome.errors[0].offset, input.find("Position: b.") - 1);
    try {
        parse_joint(input, false);
        FAIL();
    } catch (const JointParseError &e) {
        EXPECT_EQ(e.errors().size(), 1u);
    }
    EXPECT_THROW(parse_joint("   ", false), JointParseError);
    EXPECT_THROW(parse_joint("Position: a # Role: Bogus # Answer: x # Question: q?", true), JointParseError);
    EXPECT_THROW(parse_joint("Position: a # Role: FramePurpose # Answer: x # Question: q?", false), JointParseError);
    EXPECT_THROW(parse_joint("Position: a # Answer: x # Question: not a question", false), JointParseError);
}

TEST(Examples, AnchorsSkipQuestionRunsAndTitle) {
    auto rec = small_record();
    auto smoothed = remove_questions(rec);
    EXPECT_EQ(smoothed.sentences.size(), 4u);
    EXPECT_EQ(smoothed.index_map, (std::vector<int>{0, 1, kRemoved, 2, 3, kRemoved, kRemoved, 4}));
    auto anchored = anchor_questions(smoothed, rec.questions);
    ASSERT_EQ(anchored.size(), 3u);
    EXPECT_EQ(anchored[0].smoothed_anchor, 1);
    EXPECT_EQ(anchored[1].smoothed_anchor, 3);
    EXPECT_EQ(anchored[2].smoothed_anchor, 3);
    EXPECT_EQ(anchor_questions(smoothed, rec.questions, true).size(), 4u);
}

TEST(Examples, PipelineTargetsAndInputs) {
    auto rec = small_record();
    auto smoothed = remove_questions(rec);
    const std::string body = "Plants need light. Leaves turn to the sun. Roots absorb water. Soil holds the water.";

    auto pp = make_training_examples(smoothed, rec.questions, Paradigm::PP);
    ASSERT_EQ(pp.size(), 1u);
    EXPECT_EQ(pp[0].input_text, "Why plants?\n" + body);
    EXPECT_EQ(pp[0].target_text, "Plants need light. | Roots absorb water. | Roots absorb water.");
    EXPECT_EQ(pp[0].qid, "ALL");

    auto ae = make_training_examples(smoothed, rec.questions, Paradigm::AE);
    ASSERT_EQ(ae.size(), 3u);
    EXPECT_EQ(ae[0].input_text,
              "Why plants?\nPlants need light. [Question] Leaves turn to the sun. Roots absorb water. Soil holds the water.");
    EXPECT_EQ(ae[0].target_text, "Leaves, sun");
    EXPECT_EQ(ae[2].target_text, "NO ANSWER");

    auto qg = make_training_examples(smoothed, rec.questions, Paradigm::QG);
    EXPECT_EQ(qg[1].input_text.substr(qg[1].input_text.rfind('\n')), "\nAnswer: water");
    EXPECT_EQ(qg[1].target_text, "How much water do roots take?");

    auto mt = make_training_examples(smoothed, rec.questions, Paradigm::Multitask);
    ASSERT_EQ(mt.size(), 7u);
    EXPECT_EQ(mt[0].input_text.rfind("predict positions: ", 0), 0u);
    EXPECT_EQ(mt[1].input_text.rfind("extract answer: ", 0), 0u);
    EXPECT_EQ(mt[4].input_text.rfind("generate question: ", 0), 0u);
}

TEST(Examples, JointTargetsParseBack) {
    auto rec = small_record();
    auto smoothed = remove_questions(rec);
    for (auto p : {Paradigm::Joint, Paradigm::JointR}) {
        auto ex = make_training_examples(smoothed, rec.questions, p);
        ASSERT_EQ(ex.size(), 1u);
        auto entries = parse_joint(ex[0].target_text, p == Paradigm::JointR);
        ASSERT_EQ(entries.size(), 3u);
        EXPECT_EQ(entries[2].question, "What about soil?");
        EXPECT_TRUE(entries[2].answer_keywords.empty());
        if (p == Paradigm::JointR) {
            EXPECT_EQ(entries[1].role, QuestionRole::FramePurpose);
        }
    }
}

TEST(Examples, JsonRoundTrip) {
    TrainingExample e{TaskKind::QG, "in", "out?", "d", "q1"};
    EXPECT_EQ(training_example_from_json(to_json(e), "x"), e);
    auto j = to_json(e);
    j["task"] = "Nope";
    EXPECT_THROW(training_example_from_json(j, "x"), ValidationError);
    EXPECT_EQ(parse_paradigm("jointr"), Paradigm::JointR);
}

TEST(Noise, CountDistanceAndDeterminism) {
    std::vector<std::string> warnings;
    std::set<int> qs = {30, 70};
    auto a = detail::select_noise(100, qs, 0.03, 10, 42, warnings);
    auto b = detail::select_noise(100, qs, 0.03, 10, 42, warnings);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), 3u);
    std::set<int> all = qs;
    for (int x : a)
        for (int y : all)
            EXPECT_GE(std::abs(x - y), 10);
    EXPECT_EQ(detail::select_noise(100, qs, 0.01, 10, 1, warnings).size(), 1u);
    EXPECT_EQ(detail::select_noise(101, qs, 0.01, 10, 1, warnings).size(), 2u);
    EXPECT_TRUE(warnings.empty());
    detail::select_noise(10, {5}, 0.5, 10, 1, warnings);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Noise, PicksAreMutuallyDistant) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> w;
        int n = 20 + static_cast<int>(rng() % 200);
        auto picks = detail::select_noise(n, {}, 0.05, 10, rng(), w);
        for (std::size_t i = 1; i < picks.size(); ++i)
            EXPECT_GE(picks[i] - picks[i - 1], 10);
    }
}

TEST(Prepare, IndexMapIsConsistentWithRetainedText) {
    auto rec = small_record();
    std::vector<std::string> body;
    for (int i = 0; i < 60; ++i)
        body.push_back("Filler sentence " + std::to_string(i + 1) + " about roots.");
    rec.document.sentences.insert(rec.document.sentences.end(), body.begin(), body.end());
    SimulatedBackend backend;
    PrepareOptions opts;
    opts.noise_rate = 0.03;
    auto prepared = prepare_document(rec, backend, opts);
    const auto &s = prepared.smoothed;
    EXPECT_EQ(s.noise_indices.size(), 3u);
    EXPECT_EQ(s.question_indices, (std::vector<int>{2, 5, 6}));
    EXPECT_EQ(s.sentences.size(), rec.document.size() - 6);
    int expected = 0;
    for (std::size_t i = 1; i < s.index_map.size(); ++i) {
        bool removed = std::count(s.question_indices.begin(), s.question_indices.end(), static_cast<int>(i)) ||
                       std::count(s.noise_indices.begin(), s.noise_indices.end(), static_cast<int>(i));
        EXPECT_EQ(s.index_map[i], removed ? kRemoved : ++expected);
    }
    for (int q : s.question_indices)
        for (const auto &sent : s.sentences)
            EXPECT_EQ(sent.find(rec.document.sentence(static_cast<std::size_t>(q))), std::string::npos);
    auto again = prepare_document(rec, backend, opts);
    EXPECT_EQ(again.smoothed, s);
    EXPECT_EQ(smoothed_from_json(to_json(s), "x"), s);
}

TEST(Truncate, ShortSpanIsOneSegment) {
    auto doc = gqtest::make_doc("d", gqtest::filler(30));
    auto r = truncate_context(doc, 10, 12, 1000);
    EXPECT_EQ(r.kept_first, 5);
    EXPECT_EQ(r.kept_last, 17);
    ASSERT_EQ(r.segments.size(), 1u);
    EXPECT_EQ(r.segments[0].tokens, 13u * 5);
    auto edge = truncate_context(doc, 2, 29, 10000);
    EXPECT_EQ(edge.kept_first, 0);
    EXPECT_EQ(edge.kept_last, 30);
}

TEST(Truncate, SegmentsCoverFitAndAvoidAnchors) {
    std::mt19937_64 rng(8);
    int split = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 30 + static_cast<int>(rng() % 70);
        auto doc = gqtest::make_doc("d", gqtest::filler(n));
        int first = 1 + static_cast<int>(rng() % 10);
        int last = std::min(n, first + 10 + static_cast<int>(rng() % 60));
        std::vector<int> anchors = {first, last};
        for (int k = 0; k < 3; ++k)
            anchors.push_back(first + static_cast<int>(rng() % static_cast<unsigned>(last - first + 1)));
        std::size_t max_len = 40 + rng() % 200;
        TruncationResult r;
        try {
            r = truncate_context(doc, first, last, max_len, anchors);
        } catch (const ValidationError &) {
            continue;
        }
        ASSERT_FALSE(r.segments.empty());
        split += r.segments.size() > 1;
        EXPECT_EQ(r.segments.front().first, r.kept_first);
        EXPECT_EQ(r.segments.back().last, r.kept_last);
        for (std::size_t i = 0; i < r.segments.size(); ++i) {
            EXPECT_LE(r.segments[i].tokens, max_len);
            if (i > 0) {
                EXPECT_EQ(r.segments[i].first, r.segments[i - 1].last + 1);
                int b = r.segments[i - 1].last;
                for (int a : anchors)
                    EXPECT_FALSE(b >= a - 3 && b < a + 3) << "cut after " << b << " near anchor " << a;
            }
        }
    }
    EXPECT_GE(split, 60);
}

TEST(Truncate, RejectsBadArguments) {
    auto doc = gqtest::make_doc("d", gqtest::filler(10));
    EXPECT_THROW(truncate_context(doc, 0, 3, 100), ValidationError);
    EXPECT_THROW(truncate_context(doc, 4, 3, 100), ValidationError);
    EXPECT_THROW(truncate_context(doc, 1, 3, 0), ValidationError);
    EXPECT_THROW(truncate_context(doc, 1, 3, 2), ValidationError);
}
