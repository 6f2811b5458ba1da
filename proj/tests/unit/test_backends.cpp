#include "gq/http_backend.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <numeric>
#include <thread>

using namespace gq;

namespace {

RetryPolicy instant_retry(int attempts, std::vector<long> *delays = nullptr) {
    RetryPolicy p;
    p.max_attempts = attempts;
    p.sleep = [delays](std::chrono::milliseconds d) {
        if (delays)
            delays->push_back(static_cast<long>(d.count()));
    };
    return p;
}

// Local OpenAI-compatible server for contract tests.
class FakeServer {
  public:
    FakeServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server &server() { return server_; }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

HttpBackendConfig config_for(const FakeServer &s) {
    HttpBackendConfig cfg;
    cfg.api_base = s.base();
    cfg.model = "test-model";
    cfg.api_key = "secret";
    cfg.timeout = std::chrono::seconds(5);
    cfg.retry = instant_retry(3);
    return cfg;
}

} // namespace

TEST(Retry, TransientFailuresAreRetriedWithBackoff) {
    std::vector<long> delays;
    int calls = 0;
    auto result = with_retry(instant_retry(4, &delays), [&] {
        if (++calls < 3)
            throw BackendError(BackendError::Kind::Transient, "flaky");
        return 7;
    });
    EXPECT_EQ(result, 7);
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(delays, (std::vector<long>{500, 1000}));
}

TEST(Retry, ExhaustionAndNonTransient) {
    int calls = 0;
    try {
        with_retry(instant_retry(3), [&]() -> int {
            ++calls;
            throw BackendError(BackendError::Kind::Transient, "down");
        });
        FAIL();
    } catch (const BackendError &e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::RetryExhausted);
    }
    EXPECT_EQ(calls, 3);
    calls = 0;
    EXPECT_THROW(with_retry(instant_retry(3),
                            [&]() -> int {
                                ++calls;
                                throw BackendError(BackendError::Kind::Authentication, "no");
                            }),
                 BackendError);
    EXPECT_EQ(calls, 1);
}

TEST(Retry, DelayIsCapped) {
    RetryPolicy p;
    EXPECT_EQ(p.delay_for(0).count(), 500);
    EXPECT_EQ(p.delay_for(3).count(), 4000);
    EXPECT_EQ(p.delay_for(10).count(), 8000);
}

TEST(Requests, ContractIsChecked) {
    EchoGenerator echo;
    GenerationRequest r;
    r.prompt = "  ";
    EXPECT_THROW(echo.generate_text(r), BackendError);
    r.prompt = "hi";
    r.temperature = 2.5;
    EXPECT_THROW(echo.generate_text(r), BackendError);
    r.temperature = 0;
    r.max_tokens = 0;
    EXPECT_THROW(echo.generate_text(r), BackendError);
    r.max_tokens = 1;
    EXPECT_EQ(echo.generate_text(r), "hi");
}

TEST(Concurrency, ParallelMapKeepsOrderAndRethrowsFirstError) {
    std::vector<int> xs(200);
    std::iota(xs.begin(), xs.end(), 0);
    auto ys = parallel_map(xs, 8, [](int x) { return x * x; });
    for (int i = 0; i < 200; ++i)
        EXPECT_EQ(ys[static_cast<std::size_t>(i)], i * i);
    try {
        parallel_map(xs, 4, [](int x) -> int {
            if (x == 17 || x == 150)
                throw std::runtime_error("bad " + std::to_string(x));
            return x;
        });
        FAIL();
    } catch (const std::runtime_error &e) {
        EXPECT_STREQ(e.what(), "bad 17");
    }
    EXPECT_TRUE(parallel_map(std::vector<int>{}, 4, [](int x) { return x; }).empty());
}

TEST(Concurrency, GateBoundsInflightRequests) {
    InflightGate gate(3);
    std::vector<int> xs(40);
    std::atomic<int> active{0}, worst{0};
    parallel_map(xs, 12, [&](int) {
        InflightGate::Ticket t(gate);
        int now = ++active;
        int prev = worst.load();
        while (now > prev && !worst.compare_exchange_weak(prev, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        --active;
        return 0;
    });
    EXPECT_LE(worst.load(), 3);
    EXPECT_LE(gate.peak(), 3u);
    EXPECT_GE(gate.peak(), 1u);
}

TEST(Stubs, CannedRepeatsLastAndRecordsRequests) {
    CannedGenerator g({"a", "b"});
    GenerationRequest r;
    r.prompt = "p";
    EXPECT_EQ(g.generate_text(r), "a");
    EXPECT_EQ(g.generate_text(r), "b");
    EXPECT_EQ(g.generate_text(r), "b");
    EXPECT_EQ(g.requests().size(), 3u);
    UnsupportedScorer s;
    try {
        s.score_tokens("c", "x");
        FAIL();
    } catch (const BackendError &e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::Capability);
    }
}

TEST(HttpBackend, ChatCompletionWireFormat) {
    FakeServer fake;
    nlohmann::json seen;
    std::string auth;
    fake.server().Post("/v1/chat/completions", [&](const httplib::Request &req, httplib::Response &res) {
        seen = nlohmann::json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Hello there"}}]})", "application/json");
    });
    HttpBackend backend(config_for(fake));
    GenerationRequest r;
    r.prompt = "Say hi";
    r.temperature = 0;
    r.max_tokens = 16;
    r.stop = {"\n\n"};
    r.prefix = "Hel";
    r.suppress_eos = true;
    EXPECT_EQ(backend.generate_text(r), "Hello there");
    EXPECT_EQ(auth, "Bearer secret");
    EXPECT_EQ(seen["model"], "test-model");
    EXPECT_EQ(seen["messages"][0]["content"], "Say hi");
    EXPECT_EQ(seen["messages"][1]["role"], "assistant");
    EXPECT_EQ(seen["messages"][1]["content"], "Hel");
    EXPECT_EQ(seen["max_tokens"], 16);
    EXPECT_EQ(seen["stop"][0], "\n\n");
    EXPECT_EQ(seen["ignore_eos"], true);
}

TEST(HttpBackend, ScoreReturnsContinuationTokensOnly) {
    FakeServer fake;
    fake.server().Post("/v1/completions", [&](const httplib::Request &req, httplib::Response &res) {
        auto body = nlohmann::json::parse(req.body);
        EXPECT_EQ(body["prompt"], "ctx here next");
        EXPECT_EQ(body["echo"], true);
        nlohmann::json lp{{"tokens", {"ctx", " here", " next"}},
                          {"token_logprobs", {nullptr, -1.0, -2.0}},
                          {"text_offset", {0, 3, 8}}};
        res.set_content(nlohmann::json{{"choices", {{{"logprobs", lp}}}}}.dump(), "application/json");
    });
    HttpBackend backend(config_for(fake));
    auto scores = backend.score_tokens("ctx here", "next");
    ASSERT_EQ(scores.size(), 1u);
    EXPECT_EQ(scores[0].token, " next");
    EXPECT_EQ(scores[0].logprob, -2.0);
}

TEST(HttpBackend, EmbeddingsWireFormat) {
    FakeServer fake;
    fake.server().Post("/v1/token_embeddings", [&](const httplib::Request &, httplib::Response &res) {
        res.set_content(R"({"data":[{"token":"a","embedding":[1,0]},{"token":"b","embedding":[0,1]}]})",
                        "application/json");
    });
    HttpBackend backend(config_for(fake));
    auto e = backend.embed_tokens("a b");
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[1].vector, (std::vector<double>{0, 1}));
}

TEST(HttpBackend, StatusCodesMapToErrorKinds) {
    FakeServer fake;
    std::atomic<int> hits{0};
    fake.server().Post("/v1/chat/completions", [&](const httplib::Request &req, httplib::Response &res) {
        ++hits;
        auto body = nlohmann::json::parse(req.body);
        auto prompt = body["messages"][0]["content"].get<std::string>();
        if (prompt == "auth")
            res.status = 401;
        else if (prompt == "busy")
            res.status = 503;
        else if (prompt == "long") {
            res.status = 400;
            res.set_content("maximum context length exceeded", "text/plain");
        } else
            res.status = 418;
    });
    HttpBackend backend(config_for(fake));
    auto kind_of = [&](const std::string &prompt) {
        GenerationRequest r;
        r.prompt = prompt;
        try {
            backend.generate_text(r);
        } catch (const BackendError &e) {
            return e.kind();
        }
        return BackendError::Kind::Precondition;
    };
    EXPECT_EQ(kind_of("auth"), BackendError::Kind::Authentication);
    EXPECT_EQ(kind_of("long"), BackendError::Kind::ContextOverflow);
    EXPECT_EQ(kind_of("teapot"), BackendError::Kind::Protocol);
    hits = 0;
    EXPECT_EQ(kind_of("busy"), BackendError::Kind::RetryExhausted);
    EXPECT_EQ(hits.load(), 3);
    try {
        backend.score_tokens("a", "b");
        FAIL();
    } catch (const BackendError &e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::Capability);
    }
}

TEST(HttpBackend, UnreachableServerIsTransientThenExhausted) {
    HttpBackendConfig cfg;
    cfg.api_base = "http://127.0.0.1:1/v1";
    cfg.timeout = std::chrono::seconds(1);
    cfg.retry = instant_retry(2);
    HttpBackend backend(cfg);
    GenerationRequest r;
    r.prompt = "x";
    try {
        backend.generate_text(r);
        FAIL();
    } catch (const BackendError &e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::RetryExhausted);
    }
    HttpBackendConfig bad;
    bad.api_base = "localhost:8000";
    EXPECT_THROW(HttpBackend{bad}, ValidationError);
}
