#include "support/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace gq;
using gqtest::run_cli;

namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        unsetenv("GQ_API_KEY");
        gqtest::write_raw_corpus(dir / "raw.jsonl", 5, 6);
    }
    std::string p(const std::string &name) const { return (dir / name).string(); }

    // extract -> annotate -> prepare -> generate
    void run_pipeline() {
        ASSERT_EQ(run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("ext.jsonl")}).code, 0);
        ASSERT_EQ(run_cli({"annotate", "--in", p("ext.jsonl"), "--out", p("ann.jsonl"), "--triage-out", p("tri.jsonl")}).code, 0);
        ASSERT_EQ(run_cli({"prepare", "--in", p("ann.jsonl"), "--out", p("train.jsonl"), "--docs-out", p("docs.jsonl"),
                           "--paradigm", "JointR"})
                      .code,
                  0);
        ASSERT_EQ(run_cli({"generate", "--in", p("docs.jsonl"), "--out", p("gen.jsonl")}).code, 0);
    }

    gqtest::TempDir dir;
};

} // namespace

TEST_F(CliTest, FullPipelineProducesOutputsAndSidecars) {
    run_pipeline();
    for (auto f : {"ext.jsonl", "ann.jsonl", "tri.jsonl", "train.jsonl", "docs.jsonl", "gen.jsonl"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    auto meta = Json::parse(gqtest::read_file(dir / "gen.jsonl.meta.json"));
    EXPECT_EQ(meta["command"], "generate");
    EXPECT_EQ(meta["config_hash"].get<std::string>().size(), 16u);
    EXPECT_FALSE(meta["config"].contains("api_key"));

    auto corpus = load_corpus(dir / "ann.jsonl");
    EXPECT_EQ(corpus.size(), 6u);
    for (const auto &d : corpus)
        EXPECT_TRUE(validate_record(d).empty());

    std::ifstream train(dir / "train.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(train, line)) {
        auto ex = training_example_from_json(Json::parse(line), "t");
        EXPECT_EQ(ex.task, TaskKind::JointR);
        EXPECT_NO_THROW(parse_joint(ex.target_text, true));
        ++n;
    }
    EXPECT_EQ(n, 6);

    auto ev = run_cli({"evaluate", "--gen", p("gen.jsonl"), "--ref", p("ann.jsonl"), "--out", p("eval.json")});
    ASSERT_EQ(ev.code, 0) << ev.err;
    auto rep = Json::parse(gqtest::read_file(dir / "eval.json"));
    EXPECT_TRUE(rep["subsets"].contains("All"));
    EXPECT_EQ(rep["provenance"]["command"], "evaluate");

    auto az = run_cli({"analyze", "--in", p("ann.jsonl"), "--csv-dir", p("csv")});
    ASSERT_EQ(az.code, 0) << az.err;
    EXPECT_TRUE(Json::parse(az.out).contains("role_distribution"));
    EXPECT_TRUE(std::filesystem::exists(dir / "csv" / "position_quintiles.csv"));

    auto ppl = run_cli({"ppl-profile", "--docs", p("ann.jsonl")});
    ASSERT_EQ(ppl.code, 0) << ppl.err;
    EXPECT_EQ(Json::parse(ppl.out)["offsets"].size(), 7u);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
    run_pipeline();
    for (auto f : {"ext.jsonl", "ann.jsonl", "tri.jsonl", "train.jsonl", "docs.jsonl", "gen.jsonl"})
        std::filesystem::rename(dir / f, dir / (std::string("first-") + f));
    run_pipeline();
    for (auto f : {"ext.jsonl", "ann.jsonl", "tri.jsonl", "train.jsonl", "docs.jsonl", "gen.jsonl"})
        EXPECT_EQ(gqtest::read_file(dir / f), gqtest::read_file(dir / (std::string("first-") + f))) << f;
}

TEST_F(CliTest, RefusesToOverwriteWithoutForce) {
    ASSERT_EQ(run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("ext.jsonl")}).code, 0);
    auto again = run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("ext.jsonl")});
    EXPECT_EQ(again.code, 1);
    EXPECT_NE(again.err.find("--force"), std::string::npos);
    EXPECT_EQ(run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("ext.jsonl"), "--force"}).code, 0);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cli({}).code, 1);
    EXPECT_EQ(run_cli({"bogus"}).code, 1);
    EXPECT_EQ(run_cli({"extract", "--in", p("missing.jsonl"), "--out", p("x.jsonl")}).code, 1);
    EXPECT_EQ(run_cli({"extract", "--help"}).code, 0);

    gqtest::write_file(dir / "bad.jsonl", "{\"doc_id\": 1}\n");
    EXPECT_EQ(run_cli({"extract", "--in", p("bad.jsonl"), "--out", p("x.jsonl")}).code, 1);
    gqtest::write_file(dir / "broken.jsonl", "{oops\n");
    EXPECT_EQ(run_cli({"extract", "--in", p("broken.jsonl"), "--out", p("y.jsonl")}).code, 1);

    ASSERT_EQ(run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("ext.jsonl")}).code, 0);
    auto http = run_cli({"annotate", "--in", p("ext.jsonl"), "--out", p("ann.jsonl"), "--backend", "http"});
    EXPECT_EQ(http.code, 2);
    EXPECT_NE(http.err.find("GQ_API_KEY"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "ann.jsonl"));
}

TEST_F(CliTest, ConfigFileIsValidated) {
    gqtest::write_file(dir / "typo.json", R"({"noise_rat": 0.1})");
    auto r = run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("x.jsonl"), "--config", p("typo.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("noise_rat"), std::string::npos);
    gqtest::write_file(dir / "ok.json", R"({"min_questions": 50})");
    ASSERT_EQ(run_cli({"extract", "--in", p("raw.jsonl"), "--out", p("x.jsonl"), "--config", p("ok.json")}).code, 0);
    EXPECT_EQ(gqtest::read_file(dir / "x.jsonl"), "");
}

TEST_F(CliTest, EntscoreAndJudge) {
    run_pipeline();
    auto corpus = load_corpus(dir / "ann.jsonl");
    std::string summaries;
    for (const auto &d : corpus)
        summaries += Json{{"doc_id", d.document.doc_id}, {"summary", d.document.sentences[0]}}.dump() + "\n";
    gqtest::write_file(dir / "sum.jsonl", summaries);
    auto ent = run_cli({"entscore", "--summaries", p("sum.jsonl"), "--ref", p("ann.jsonl")});
    ASSERT_EQ(ent.code, 0) << ent.err;
    auto score = Json::parse(ent.out)["EntScore"].get<double>();
    EXPECT_GE(score, 0.0);
    EXPECT_LE(score, 1.0 + 1e-9);

    Json item{{"id", "j1"}, {"title", "T"}, {"article", "Some article text."}, {"summaries", {"a.", "b.", "c."}}};
    gqtest::write_file(dir / "judge.jsonl", item.dump() + "\n");
    auto judge = run_cli({"judge", "--in", p("judge.jsonl"), "--metric", "Consistency"});
    ASSERT_EQ(judge.code, 0) << judge.err;
    auto first = Json::parse(judge.out.substr(0, judge.out.find('\n')));
    EXPECT_EQ(first["scores"].size(), 3u);
}

TEST(Config, RoundTripHashAndValidation) {
    RunConfig c;
    c.noise_rate = 0.05;
    c.finetuned.joint = "my-joint";
    auto back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    auto keyed = c;
    keyed.api_key = "secret";
    EXPECT_EQ(config_hash(keyed), config_hash(c));
    auto other = c;
    other.seed += 1;
    EXPECT_NE(config_hash(other), config_hash(c));
    EXPECT_THROW(config_from_json(Json{{"seed", "x"}}), ValidationError);
    RunConfig bad;
    bad.noise_rate = 1.5;
    EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Prompts, ShippedDirectoryMatchesDefaults) {
    auto shipped = PromptSet::load_dir(std::filesystem::path(GQ_SOURCE_DIR) / "prompts");
    PromptSet defaults;
    for (const auto &[name, member] : PromptSet::file_names())
        EXPECT_EQ(shipped.*member, defaults.*member) << name;
}
