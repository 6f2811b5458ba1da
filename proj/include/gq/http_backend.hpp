#pragma once

// JSON-over-HTTP client for OpenAI-compatible servers.
//
//   generate_text : POST {base}/chat/completions
//   score_tokens  : POST {base}/completions  (echo + logprobs, prompt tokens only)
//   embed_tokens  : POST {base}/token_embeddings
//                   request  {"model": str, "input": str}
//                   response {"data": [{"token": str, "embedding": [float...]}, ...]}

#include "gq/backends.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <string>

namespace gq {

struct HttpBackendConfig {
    std::string api_base = "http://localhost:8000/v1";
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{120};
    std::size_t max_inflight = 4;
    RetryPolicy retry;
};

class HttpBackend final : public TextGenerator, public TokenScorer, public TokenEmbedder {
  public:
    explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)), gate_(cfg_.max_inflight) {
        auto scheme_end = cfg_.api_base.find("://");
        if (scheme_end == std::string::npos)
            throw ValidationError("api base must include a scheme: " + cfg_.api_base);
        auto path_start = cfg_.api_base.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            host_ = cfg_.api_base;
        } else {
            host_ = cfg_.api_base.substr(0, path_start);
            path_prefix_ = cfg_.api_base.substr(path_start);
        }
        while (!path_prefix_.empty() && path_prefix_.back() == '/')
            path_prefix_.pop_back();
    }

    const HttpBackendConfig &config() const { return cfg_; }
    const InflightGate &gate() const { return gate_; }

  protected:
    std::string do_generate(const GenerationRequest &req) override {
        nlohmann::json body;
        body["model"] = req.model.empty() ? cfg_.model : req.model;
        body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}});
        if (!req.prefix.empty()) {
            body["messages"].push_back({{"role", "assistant"}, {"content", req.prefix}});
            body["continue_final_message"] = true;
            body["add_generation_prompt"] = false;
        }
        body["temperature"] = req.temperature;
        body["max_tokens"] = req.max_tokens;
        if (!req.stop.empty())
            body["stop"] = req.stop;
        if (req.suppress_eos)
            body["ignore_eos"] = true;
        auto resp = post("/chat/completions", body, false);
        try {
            return resp.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception &) {
            throw BackendError(BackendError::Kind::Protocol, "chat completion response lacks choices[0].message.content");
        }
    }

    std::vector<TokenScore> do_score(std::string_view context, std::string_view continuation) override {
        std::string prompt(context);
        if (!prompt.empty())
            prompt.push_back(' ');
        const auto boundary = prompt.size();
        prompt.append(continuation);
        nlohmann::json body{{"model", cfg_.model}, {"prompt", prompt}, {"max_tokens", 1},
                            {"echo", true},         {"logprobs", 1},   {"temperature", 0.0}};
        auto resp = post("/completions", body, true);
        std::vector<TokenScore> out;
        try {
            const auto &lp = resp.at("choices").at(0).at("logprobs");
            const auto &tokens = lp.at("tokens");
            const auto &logprobs = lp.at("token_logprobs");
            const auto &offsets = lp.at("text_offset");
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                auto off = offsets.at(i).get<std::size_t>();
                auto token = tokens.at(i).get<std::string>();
                // Tokenizers usually attach the separating space to the next token.
                auto lead = std::min(token.find_first_not_of(' '), token.size());
                if (off + lead < boundary || off >= prompt.size() || logprobs.at(i).is_null())
                    continue;
                out.push_back({std::move(token), logprobs.at(i).get<double>()});
            }
        } catch (const nlohmann::json::exception &) {
            throw BackendError(BackendError::Kind::Protocol, "completion response lacks echoed logprobs");
        }
        if (out.empty())
            throw BackendError(BackendError::Kind::Capability, "server returned no prompt logprobs");
        return out;
    }

    std::vector<TokenEmbedding> do_embed(std::string_view input) override {
        nlohmann::json body{{"model", cfg_.model}, {"input", std::string(input)}};
        auto resp = post("/token_embeddings", body, true);
        std::vector<TokenEmbedding> out;
        try {
            for (const auto &item : resp.at("data"))
                out.push_back({item.at("token").get<std::string>(), item.at("embedding").get<std::vector<double>>()});
        } catch (const nlohmann::json::exception &) {
            throw BackendError(BackendError::Kind::Protocol, "token embedding response malformed");
        }
        return out;
    }

  private:
    nlohmann::json post(const std::string &endpoint, const nlohmann::json &body, bool optional_capability) {
        return with_retry(cfg_.retry, [&] {
            InflightGate::Ticket ticket(gate_);
            httplib::Client client(host_);
            client.set_connection_timeout(cfg_.timeout);
            client.set_read_timeout(cfg_.timeout);
            client.set_write_timeout(cfg_.timeout);
            httplib::Headers headers;
            if (!cfg_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_key);
            auto res = client.Post(path_prefix_ + endpoint, headers, body.dump(), "application/json");
            if (!res)
                throw BackendError(BackendError::Kind::Transient,
                                   "request to " + host_ + path_prefix_ + endpoint + " failed: " + httplib::to_string(res.error()));
            classify_status(res->status, res->body, endpoint, optional_capability);
            try {
                return nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::parse_error &) {
                throw BackendError(BackendError::Kind::Protocol, endpoint + ": response is not JSON");
            }
        });
    }

    static void classify_status(int status, const std::string &body, const std::string &endpoint,
                                bool optional_capability) {
        using K = BackendError::Kind;
        if (status >= 200 && status < 300)
            return;
        const std::string where = endpoint + ": HTTP " + std::to_string(status);
        if (status == 401 || status == 403)
            throw BackendError(K::Authentication, where + " (check GQ_API_KEY)");
        auto lower = text::lowercase(body);
        if ((status == 400 || status == 413 || status == 422) && lower.find("context") != std::string::npos &&
            (lower.find("length") != std::string::npos || lower.find("window") != std::string::npos))
            throw BackendError(K::ContextOverflow, where + ": " + body);
        if (optional_capability && (status == 404 || status == 405 || status == 501))
            throw BackendError(K::Capability, where + ": endpoint not supported by this server");
        if (status == 408 || status == 409 || status == 429 || status >= 500)
            throw BackendError(K::Transient, where);
        throw BackendError(K::Protocol, where + ": " + body);
    }

    HttpBackendConfig cfg_;
    InflightGate gate_;
    std::string host_;
    std::string path_prefix_;
};

} // namespace gq
