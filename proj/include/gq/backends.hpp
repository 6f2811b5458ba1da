#pragma once

#include "gq/error.hpp"
#include "gq/text.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gq {

class BackendError : public Error {
  public:
    enum class Kind {
        Transient,       // retryable: network failure, 429, 5xx
        RetryExhausted,  // transient failures outlasted the retry policy
        Authentication,  // 401/403 or missing credentials
        ContextOverflow, // prompt exceeds the model context
        Capability,      // backend cannot provide the requested capability
        Precondition,    // caller violated the request contract
        Protocol,        // response did not match the wire format
    };

    BackendError(Kind kind, const std::string &what) : Error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

inline std::string_view to_string(BackendError::Kind k) {
    using K = BackendError::Kind;
    switch (k) {
    case K::Transient:
        return "transient";
    case K::RetryExhausted:
        return "retry-exhausted";
    case K::Authentication:
        return "authentication";
    case K::ContextOverflow:
        return "context-overflow";
    case K::Capability:
        return "capability";
    case K::Precondition:
        return "precondition";
    case K::Protocol:
        return "protocol";
    }
    return "unknown";
}

struct GenerationRequest {
    std::string prompt;
    double temperature = 0.2;
    int max_tokens = 1024;
    std::vector<std::string> stop;
    std::string model;          // empty selects the backend default
    std::string prefix;         // forced start of the completion (continuation mode)
    bool suppress_eos = false;  // ask the server not to stop at end-of-sequence

    void validate() const {
        if (text::trim(prompt).empty())
            throw BackendError(BackendError::Kind::Precondition, "generation prompt is empty");
        if (!(temperature >= 0.0 && temperature <= 2.0))
            throw BackendError(BackendError::Kind::Precondition, "temperature must lie in [0, 2]");
        if (max_tokens <= 0)
            throw BackendError(BackendError::Kind::Precondition, "max_tokens must be positive");
    }
};

struct TokenScore {
    std::string token;
    double logprob = 0.0;
};

struct TokenEmbedding {
    std::string token;
    std::vector<double> vector;
};

// The three model capabilities. Public entry points check the request
// contract, then delegate to the implementation hook.

class TextGenerator {
  public:
    virtual ~TextGenerator() = default;

    std::string generate_text(const GenerationRequest &req) {
        req.validate();
        return do_generate(req);
    }

  protected:
    virtual std::string do_generate(const GenerationRequest &req) = 0;
};

class TokenScorer {
  public:
    virtual ~TokenScorer() = default;

    std::vector<TokenScore> score_tokens(std::string_view context, std::string_view continuation) {
        if (text::trim(continuation).empty())
            throw BackendError(BackendError::Kind::Precondition, "score_tokens: continuation is empty");
        auto scores = do_score(context, continuation);
        for (const auto &s : scores)
            if (!std::isfinite(s.logprob) || s.logprob > 0.0)
                throw BackendError(BackendError::Kind::Protocol,
                                   "score_tokens: logprob must be finite and <= 0 (token '" + s.token + "')");
        return scores;
    }

  protected:
    virtual std::vector<TokenScore> do_score(std::string_view context, std::string_view continuation) = 0;
};

class TokenEmbedder {
  public:
    virtual ~TokenEmbedder() = default;

    std::vector<TokenEmbedding> embed_tokens(std::string_view input) {
        if (text::trim(input).empty())
            throw BackendError(BackendError::Kind::Precondition, "embed_tokens: text is empty");
        auto out = do_embed(input);
        if (out.empty())
            throw BackendError(BackendError::Kind::Protocol, "embed_tokens: no embeddings returned");
        for (const auto &e : out)
            if (e.vector.size() != out.front().vector.size())
                throw BackendError(BackendError::Kind::Protocol, "embed_tokens: inconsistent dimensions");
        return out;
    }

  protected:
    virtual std::vector<TokenEmbedding> do_embed(std::string_view input) = 0;
};

// ---------------------------------------------------------------------------
// Retry

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{8000};
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };

    std::chrono::milliseconds delay_for(int attempt) const {
        auto d = base_delay * (1LL << std::min(attempt, 20));
        return std::min<std::chrono::milliseconds>(d, max_delay);
    }
};

// Runs `fn`, retrying Transient failures with exponential backoff. Requests are
// idempotent reads, so a retry never duplicates a side effect.
template <typename Fn>
auto with_retry(const RetryPolicy &policy, Fn &&fn) -> decltype(fn()) {
    std::string last;
    const int attempts = std::max(policy.max_attempts, 1);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        try {
            return fn();
        } catch (const BackendError &e) {
            if (e.kind() != BackendError::Kind::Transient)
                throw;
            last = e.what();
        }
        if (attempt + 1 < attempts && policy.sleep)
            policy.sleep(policy.delay_for(attempt));
    }
    throw BackendError(BackendError::Kind::RetryExhausted,
                       "gave up after " + std::to_string(attempts) + " attempts: " + last);
}

class RetryingGenerator final : public TextGenerator {
  public:
    RetryingGenerator(TextGenerator &inner, RetryPolicy policy) : inner_(inner), policy_(std::move(policy)) {}

  protected:
    std::string do_generate(const GenerationRequest &req) override {
        return with_retry(policy_, [&] { return inner_.generate_text(req); });
    }

  private:
    TextGenerator &inner_;
    RetryPolicy policy_;
};

// ---------------------------------------------------------------------------
// Concurrency

// Counting gate bounding the number of in-flight requests.
class InflightGate {
  public:
    explicit InflightGate(std::size_t limit) : limit_(std::max<std::size_t>(limit, 1)) {}

    class Ticket {
      public:
        explicit Ticket(InflightGate &gate) : gate_(&gate) { gate_->acquire(); }
        Ticket(const Ticket &) = delete;
        Ticket &operator=(const Ticket &) = delete;
        ~Ticket() { gate_->release(); }

      private:
        InflightGate *gate_;
    };

    std::size_t limit() const { return limit_; }

    std::size_t peak() const {
        std::lock_guard lock(mu_);
        return peak_;
    }

  private:
    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return active_ < limit_; });
        ++active_;
        peak_ = std::max(peak_, active_);
    }

    void release() {
        {
            std::lock_guard lock(mu_);
            --active_;
        }
        cv_.notify_one();
    }

    std::size_t limit_;
    std::size_t active_ = 0;
    std::size_t peak_ = 0;
    mutable std::mutex mu_;
    std::condition_variable cv_;
};

// Applies fn to every item with at most `limit` worker threads. Results come
// back in input order; the first exception (by index) is rethrown.
template <typename T, typename Fn>
auto parallel_map(const std::vector<T> &items, std::size_t limit, Fn fn)
    -> std::vector<std::invoke_result_t<Fn &, const T &>> {
    using R = std::invoke_result_t<Fn &, const T &>;
    std::vector<std::optional<R>> slots(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size())
                return;
            try {
                slots[i].emplace(fn(items[i]));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t n_workers = std::min(std::max<std::size_t>(limit, 1), items.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(items.size());
    for (auto &s : slots)
        out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// Deterministic stubs

class EchoGenerator final : public TextGenerator {
  protected:
    std::string do_generate(const GenerationRequest &req) override { return req.prompt; }
};

// Replays responses in order; the last one repeats once the list is exhausted.
class CannedGenerator final : public TextGenerator {
  public:
    explicit CannedGenerator(std::vector<std::string> responses) : responses_(std::move(responses)) {}

    std::vector<GenerationRequest> requests() const {
        std::lock_guard lock(mu_);
        return requests_;
    }

  protected:
    std::string do_generate(const GenerationRequest &req) override {
        std::lock_guard lock(mu_);
        requests_.push_back(req);
        if (responses_.empty())
            return {};
        std::size_t i = std::min(next_++, responses_.size() - 1);
        return responses_[i];
    }

  private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::vector<GenerationRequest> requests_;
    mutable std::mutex mu_;
};

class ScriptedGenerator final : public TextGenerator {
  public:
    using Script = std::function<std::string(const GenerationRequest &)>;

    explicit ScriptedGenerator(Script script) : script_(std::move(script)) {}

    std::vector<GenerationRequest> requests() const {
        std::lock_guard lock(mu_);
        return requests_;
    }

  protected:
    std::string do_generate(const GenerationRequest &req) override {
        {
            std::lock_guard lock(mu_);
            requests_.push_back(req);
        }
        return script_(req);
    }

  private:
    Script script_;
    std::vector<GenerationRequest> requests_;
    mutable std::mutex mu_;
};

// Every continuation token gets the same logprob. Tokens follow metric tokenization.
class ConstantLogprobScorer final : public TokenScorer {
  public:
    explicit ConstantLogprobScorer(double logprob) : logprob_(logprob) {}

  protected:
    std::vector<TokenScore> do_score(std::string_view, std::string_view continuation) override {
        std::vector<TokenScore> out;
        for (auto &t : text::metric_tokens(continuation))
            out.push_back({std::move(t), logprob_});
        return out;
    }

  private:
    double logprob_;
};

class UnsupportedScorer final : public TokenScorer {
  protected:
    std::vector<TokenScore> do_score(std::string_view, std::string_view) override {
        throw BackendError(BackendError::Kind::Capability, "backend does not expose token logprobs");
    }
};

class UnsupportedEmbedder final : public TokenEmbedder {
  protected:
    std::vector<TokenEmbedding> do_embed(std::string_view) override {
        throw BackendError(BackendError::Kind::Capability, "backend does not expose token embeddings");
    }
};

// Each distinct token maps to its own basis vector, so cosine similarity is 1
// for equal tokens and 0 otherwise.
class OneHotEmbedder final : public TokenEmbedder {
  public:
    explicit OneHotEmbedder(std::size_t dim = 4096) : dim_(dim) {}

  protected:
    std::vector<TokenEmbedding> do_embed(std::string_view input) override {
        std::vector<TokenEmbedding> out;
        std::lock_guard lock(mu_);
        for (auto &t : text::metric_tokens(input)) {
            auto [it, inserted] = vocab_.try_emplace(t, vocab_.size());
            if (it->second >= dim_)
                throw BackendError(BackendError::Kind::Capability, "one-hot vocabulary exhausted");
            std::vector<double> v(dim_, 0.0);
            v[it->second] = 1.0;
            out.push_back({std::move(t), std::move(v)});
        }
        return out;
    }

  private:
    std::size_t dim_;
    std::unordered_map<std::string, std::size_t> vocab_;
    std::mutex mu_;
};

} // namespace gq
