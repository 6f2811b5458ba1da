#include "gq/generation.hpp"
#include "gq/simulated_backend.hpp"
#include "support/builders.hpp"

#include <gtest/gtest.h>

using namespace gq;

namespace {

Document ten_sentences() {
    return gqtest::make_doc("g", {"Plants need light to grow.", "Leaves turn toward the sun.", "Roots absorb water from soil.",
                                  "Stems carry water upward.", "Flowers attract insects.", "Insects carry pollen.",
                                  "Seeds form after pollination.", "Wind spreads some seeds.", "Animals spread others.",
                                  "New plants then grow."},
                            "How plants live");
}

bool has(const std::string &s, std::string_view needle) { return s.find(needle) != std::string::npos; }

} // namespace

TEST(Generation, JointOutputBecomesSortedItems) {
    auto doc = ten_sentences();
    CannedGenerator g({"Position: Seeds form after pollination. # Role: ProvokeThought # Answer: wind # Question: How do seeds travel? | "
                       "Position: Leaves turn toward the sun. # Role: EstablishClaim # Answer: light, leaves # Question: Why turn?"});
    auto set = run_finetuned(doc, GenParadigm::JointR, g);
    ASSERT_EQ(set.items.size(), 2u);
    EXPECT_EQ(set.items[0].position, 2);
    EXPECT_EQ(set.items[0].answer_keywords, (std::vector<std::string>{"light", "leaves"}));
    EXPECT_EQ(set.items[0].role, QuestionRole::EstablishClaim);
    EXPECT_EQ(set.items[1].position, 7);
    EXPECT_EQ(g.requests()[0].model, "gq-jointr");
    EXPECT_EQ(g.requests()[0].prompt, render_model_input(doc));
}

TEST(Generation, MalformedJointIsParseError) {
    auto doc = ten_sentences();
    CannedGenerator g({"Position: x # Question: y?"});
    EXPECT_THROW(run_finetuned(doc, GenParadigm::Joint, g), ParseError);
}

TEST(Generation, PipelineRunsAeAndQgAtPredictedAnchors) {
    auto doc = ten_sentences();
    ScriptedGenerator g([&](const GenerationRequest &r) -> std::string {
        if (r.model == "gq-pp")
            return "Leaves turn toward the sun. | Seeds form after pollination.";
        if (r.model == "gq-ae")
            return has(r.prompt, "sun. [Question]") ? "light, leaves" : "NO ANSWER";
        return has(r.prompt, "Answer: light, leaves") ? "Why do leaves turn?" : "What happens next";
    });
    auto set = run_finetuned(doc, GenParadigm::Pipeline, g);
    ASSERT_EQ(set.items.size(), 2u);
    EXPECT_EQ(set.items[0].position, 2);
    EXPECT_EQ(set.items[0].question, "Why do leaves turn?");
    EXPECT_EQ(set.items[1].position, 7);
    EXPECT_TRUE(set.items[1].answer_keywords.empty());
    EXPECT_EQ(set.items[1].question, "What happens next?");
    EXPECT_EQ(set.warnings.size(), 1u);
    EXPECT_EQ(g.requests().size(), 5u);
}

TEST(Generation, MultitaskUsesPrefixesAndOneModel) {
    auto doc = ten_sentences();
    ScriptedGenerator g([&](const GenerationRequest &r) -> std::string {
        EXPECT_EQ(r.model, "gq-multitask");
        if (r.prompt.rfind("predict positions: ", 0) == 0)
            return "Roots absorb water from soil";
        if (r.prompt.rfind("extract answer: ", 0) == 0)
            return "water";
        EXPECT_EQ(r.prompt.rfind("generate question: ", 0), 0u);
        return "Where does water go?";
    });
    auto set = run_finetuned(doc, GenParadigm::Multitask, g);
    ASSERT_EQ(set.items.size(), 1u);
    EXPECT_EQ(set.items[0].position, 3); // paraphrased anchor relocated by BM25
}

TEST(Generation, ZeroShotSkipsIncompleteBlocks) {
    auto doc = ten_sentences();
    CannedGenerator g({"Output 1:\nPosition: Insects carry pollen.\nAnswer Keywords: pollen, insects\nQuestion: Who moves pollen?\n\n"
                       "Output 2:\nPosition: Wind spreads some seeds.\nQuestion: missing keywords?\n\n"
                       "Output 3:\nPosition: How plants live\nAnswer Keywords: \nQuestion: Why study plants"});
    auto set = run_zero_shot(doc, g);
    ASSERT_EQ(set.items.size(), 2u);
    EXPECT_EQ(set.items[0].position, 0);
    EXPECT_EQ(set.items[0].question, "Why study plants?");
    EXPECT_EQ(set.items[1].position, 6);
    EXPECT_EQ(set.items[1].answer_keywords, (std::vector<std::string>{"pollen", "insects"}));
    EXPECT_EQ(set.warnings.size(), 2u);
    CannedGenerator empty({"nothing useful"});
    EXPECT_THROW(run_zero_shot(doc, empty), ParseError);
    EXPECT_THROW(run_finetuned(doc, GenParadigm::ZeroShot, empty), ValidationError);
}

TEST(Generation, LongDocumentsAreSegmentedAndMerged) {
    auto doc = gqtest::make_doc("long", gqtest::filler(40));
    SimulatedBackend backend;
    GenerationOptions o;
    o.max_context_tokens = 60;
    auto set = generate_questions(doc, GenParadigm::Joint, backend, o);
    EXPECT_GT(set.raw_outputs.size(), 1u);
    ASSERT_FALSE(set.items.empty());
    EXPECT_TRUE(std::is_sorted(set.items.begin(), set.items.end(),
                               [](const auto &a, const auto &b) { return a.position < b.position; }));
    for (const auto &item : set.items) {
        ASSERT_GE(item.position, 1);
        ASSERT_LE(item.position, 40);
        EXPECT_EQ(doc.sentence(static_cast<std::size_t>(item.position)), item.raw_anchor);
    }
}

TEST(CountControl, TruncatesExactOrExtends) {
    auto doc = ten_sentences();
    GeneratedQuestionSet set;
    set.paradigm = GenParadigm::Joint;
    for (int p : {9, 2, 5, 7, 1})
        set.items.push_back({"Q" + std::to_string(p) + "?", p, {}, std::nullopt, ""});
    CannedGenerator unused({"x"});
    auto three = control_question_count(set, 3, doc, unused);
    ASSERT_EQ(three.items.size(), 3u);
    EXPECT_EQ(three.items[2].position, 5);
    EXPECT_TRUE(unused.requests().empty());

    set.items.resize(3);
    EXPECT_EQ(control_question_count(set, 3, doc, unused).items.size(), 3u);
    EXPECT_THROW(control_question_count(set, 0, doc, unused), ValidationError);
}

TEST(CountControl, ContinuationUsesPrefixAndSuppressesEos) {
    auto doc = ten_sentences();
    const std::string first = "Position: Plants need light to grow. # Answer: light # Question: Why light?";
    CannedGenerator g({first, "Position: Insects carry pollen. # Answer: pollen # Question: Who carries pollen?", ""});
    auto set = run_finetuned(doc, GenParadigm::Joint, g);
    ASSERT_EQ(set.items.size(), 1u);
    auto more = control_question_count(set, 3, doc, g);
    ASSERT_EQ(more.items.size(), 2u);
    EXPECT_EQ(more.items[1].position, 6);
    auto reqs = g.requests();
    ASSERT_EQ(reqs.size(), 4u);
    EXPECT_EQ(reqs[1].prefix, first + " | ");
    EXPECT_TRUE(reqs[1].suppress_eos);
    EXPECT_EQ(more.warnings.size(), 1u);
    EXPECT_TRUE(has(more.warnings[0], "only 2 of 3"));
}

TEST(GeneratedIo, JsonlRoundTrip) {
    gqtest::TempDir dir;
    GeneratedQuestionSet s;
    s.doc_id = "a";
    s.paradigm = GenParadigm::JointR;
    s.items.push_back({"Why?", 3, {"k1", "k,2"}, QuestionRole::FramePurpose, "raw"});
    s.raw_outputs = {"out"};
    s.warnings = {"w"};
    save_generated({s, s}, dir / "g.jsonl");
    auto back = load_generated(dir / "g.jsonl");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(to_json(back[0]).dump(), to_json(s).dump());
}
