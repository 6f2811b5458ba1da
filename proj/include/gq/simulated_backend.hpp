#pragma once

// Offline backend that understands the toolkit's own prompts and fine-tuned
// model inputs and answers them deterministically. Used by `--backend stub`
// and the end-to-end tests; it is not a language model.

#include "gq/annotation.hpp"
#include "gq/backends.hpp"
#include "gq/datagen.hpp"
#include "gq/generation.hpp"
#include "gq/keywords.hpp"
#include "gq/segment.hpp"

#include <cstdio>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace gq {

class SimulatedBackend final : public TextGenerator, public TokenScorer, public TokenEmbedder {
  public:
    explicit SimulatedBackend(FinetunedModels models = {}, std::size_t embedding_dim = 64)
        : models_(std::move(models)), dim_(embedding_dim) {}

  protected:
    std::string do_generate(const GenerationRequest &req) override {
        const auto &p = req.prompt;
        const bool continuing = !req.prefix.empty();
        if (starts_with(p, kPrefixPP))
            return position_output(p.substr(kPrefixPP.size()), continuing);
        if (starts_with(p, kPrefixAE))
            return answer_output(p.substr(kPrefixAE.size()));
        if (starts_with(p, kPrefixQG))
            return question_output(p.substr(kPrefixQG.size()));
        if (req.model == models_.pp)
            return position_output(p, continuing);
        if (req.model == models_.ae)
            return answer_output(p);
        if (req.model == models_.qg)
            return question_output(p);
        if (req.model == models_.joint)
            return joint_output(p, false, continuing);
        if (req.model == models_.jointr)
            return joint_output(p, true, continuing);
        if (contains(p, "check whether these questions are self-contained"))
            return completion_output(p);
        if (contains(p, "answer these questions based on the article"))
            return answering_output(p);
        if (contains(p, "identify their role"))
            return role_output(p);
        if (contains(p, "[MASK]"))
            return smoothing_output(p);
        if (contains(p, "incorporate several questions into the text"))
            return zero_shot_output(p, continuing);
        if (contains(p, "act as an impartial judge"))
            return judge_output(p);
        return "OK";
    }

    // Logprobs in [-3.5, -0.5], a fixed function of the last context token
    // and the scored token.
    std::vector<TokenScore> do_score(std::string_view context, std::string_view continuation) override {
        auto ctx = text::metric_tokens(context);
        std::string prev = ctx.empty() ? std::string("<s>") : ctx.back();
        std::vector<TokenScore> out;
        for (auto &t : text::metric_tokens(continuation)) {
            double lp = -(0.5 + static_cast<double>(detail::fnv1a64(prev + " " + t) % 301) / 100.0);
            prev = t;
            out.push_back({std::move(t), lp});
        }
        return out;
    }

    // Pseudo-random unit-scale vector per lowercased token.
    std::vector<TokenEmbedding> do_embed(std::string_view input) override {
        std::vector<TokenEmbedding> out;
        for (auto &t : text::metric_tokens(input)) {
            std::mt19937_64 rng(detail::fnv1a64(t));
            std::vector<double> v(dim_);
            for (auto &x : v)
                x = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
            out.push_back({std::move(t), std::move(v)});
        }
        return out;
    }

  private:
    static constexpr std::array<QuestionRole, 4> kBodyRoles = {QuestionRole::FramePurpose,
                                                               QuestionRole::OrganizeDiscourse,
                                                               QuestionRole::EstablishClaim, QuestionRole::ProvokeThought};

    static bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
    static bool contains(std::string_view s, std::string_view p) { return s.find(p) != std::string_view::npos; }

    struct ParsedInput {
        std::string title;
        std::vector<std::string> sentences;
        int marker_after = -1;
        std::vector<std::string> keywords;
    };

    // Inverse of render_model_input / qg_input.
    static ParsedInput parse_model_input(std::string_view input) {
        ParsedInput out;
        auto lines = text::split_lines(input);
        if (lines.empty())
            return out;
        out.title = std::string(text::trim(lines[0]));
        std::string body;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (starts_with(lines[i], "Answer: ")) {
                out.keywords = parse_answer(lines[i].substr(8));
                continue;
            }
            body += (body.empty() ? "" : " ") + lines[i];
        }
        auto marker = std::string(kQuestionMarker);
        auto pos = body.find(marker);
        std::string before = pos == std::string::npos ? body : body.substr(0, pos);
        std::string after = pos == std::string::npos ? "" : body.substr(pos + marker.size());
        auto b = segment_sentences(before);
        auto a = segment_sentences(after);
        out.sentences = b;
        if (pos != std::string::npos)
            out.marker_after = static_cast<int>(b.size());
        out.sentences.insert(out.sentences.end(), a.begin(), a.end());
        return out;
    }

    static std::vector<std::string> parse_answer(std::string_view s) {
        std::vector<std::string> out;
        if (is_no_answer(s))
            return out;
        for (const auto &piece : split_unescaped(s, ','))
            if (auto k = std::string(text::trim(piece.text)); !k.empty())
                out.push_back(k);
        return out;
    }

    // Every fourth sentence from the second, at most five.
    static std::vector<int> anchor_positions(std::size_t n, bool continuing) {
        std::vector<int> out;
        for (std::size_t i = continuing ? 4 : 2; i <= n && out.size() < 5; i += 4)
            out.push_back(static_cast<int>(i));
        if (out.empty() && n > 0 && !continuing)
            out.push_back(1);
        return out;
    }

    static const std::string &sentence_at(const ParsedInput &in, int i) {
        return i == 0 ? in.title : in.sentences.at(static_cast<std::size_t>(i - 1));
    }

    static std::vector<std::string> keywords_for(const ParsedInput &in, int anchor) {
        auto kw = extract_answer_keywords({sentence_at(in, anchor)}, in.sentences, 3);
        return kw.keywords;
    }

    static std::string question_for(const std::vector<std::string> &kws, const std::string &anchor) {
        if (kws.empty()) {
            auto w = text::word_tokens(anchor);
            return "What comes after " + (w.empty() ? std::string("this") : text::lowercase(w.front())) + "?";
        }
        if (kws.size() == 1)
            return "What is " + kws[0] + "?";
        return "How does " + kws[0] + " relate to " + kws[1] + "?";
    }

    std::string position_output(std::string_view input, bool continuing) const {
        auto in = parse_model_input(input);
        std::vector<std::string> anchors;
        for (int a : anchor_positions(in.sentences.size(), continuing))
            anchors.push_back(escape_joint_payload(sentence_at(in, a)));
        return text::join(anchors, " | ");
    }

    std::string answer_output(std::string_view input) const {
        auto in = parse_model_input(input);
        if (in.marker_after < 0 || in.sentences.empty())
            return std::string(kNoAnswer);
        auto kws = keywords_for(in, in.marker_after);
        return kws.empty() ? std::string(kNoAnswer) : text::join(kws, ", ");
    }

    std::string question_output(std::string_view input) const {
        auto in = parse_model_input(input);
        int anchor = std::max(0, in.marker_after);
        return question_for(in.keywords, sentence_at(in, anchor));
    }

    std::string joint_output(std::string_view input, bool with_roles, bool continuing) const {
        auto in = parse_model_input(input);
        std::vector<JointEntry> entries;
        for (int a : anchor_positions(in.sentences.size(), continuing)) {
            JointEntry e;
            e.anchor_sentence = sentence_at(in, a);
            e.answer_keywords = keywords_for(in, a);
            e.question = question_for(e.answer_keywords, e.anchor_sentence);
            if (with_roles)
                e.role = kBodyRoles[detail::fnv1a64(e.anchor_sentence) % kBodyRoles.size()];
            entries.push_back(std::move(e));
        }
        if (entries.empty())
            return {};
        return flatten_joint(entries, with_roles);
    }

    static std::vector<std::pair<int, std::string>> numbered(std::string_view prompt, const std::string &label) {
        const std::regex re("^" + label + " (\\d+): (.*)$");
        std::vector<std::pair<int, std::string>> out;
        bool in_input = false;
        for (const auto &line : text::split_lines(prompt)) {
            if (starts_with(line, "[Input]"))
                in_input = true;
            else if (starts_with(line, "[Output]"))
                in_input = false;
            std::smatch m;
            if (in_input && std::regex_match(line, m, re))
                out.emplace_back(std::stoi(m[1].str()), m[2].str());
        }
        return out;
    }

    static std::string completion_output(std::string_view p) {
        std::string out;
        for (const auto &[i, q] : numbered(p, "Question"))
            out += "Question " + std::to_string(i) + ": " + detail::ensure_question_mark(q) + "\n";
        return out;
    }

    // Answer i is the sentence following the i-th "[Question]" marker's
    // question, or "no answer" when the next sentence is another question or
    // the article ends.
    static std::string answering_output(std::string_view p) {
        auto lines = text::split_lines(p);
        std::vector<std::string> body;
        bool title_marked = false;
        for (std::size_t i = 0; i + 1 < lines.size(); ++i)
            if (starts_with(lines[i], "Article: Title: ")) {
                title_marked = contains(lines[i], "[Question]");
                body = segment_sentences(lines[i + 1]);
                break;
            }
        std::vector<std::string> answers;
        if (title_marked)
            answers.push_back(body.empty() ? std::string("no answer") : body.front());
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (!starts_with(body[i], "[Question]"))
                continue;
            if (i + 1 < body.size() && !starts_with(body[i + 1], "[Question]") && body[i + 1].back() != '?')
                answers.push_back(body[i + 1]);
            else
                answers.emplace_back("no answer");
        }
        std::string out;
        for (const auto &[i, q] : numbered(p, "Question")) {
            auto k = std::to_string(i);
            const auto idx = static_cast<std::size_t>(i - 1);
            auto a = idx < answers.size() ? answers[idx] : std::string("no answer");
            out += "Answer " + k + ": " + a + "\n";
            out += "Confidence " + k + ": " + std::to_string(3 + detail::fnv1a64(q) % 3) + "\n";
        }
        return out;
    }

    static std::string role_output(std::string_view p) {
        std::string out;
        for (const auto &[i, q] : numbered(p, "Question")) {
            auto k = std::to_string(i);
            auto role = kBodyRoles[detail::fnv1a64(q) % kBodyRoles.size()];
            out += "Analysis " + k + ": The question is assigned by a fixed rule.\n";
            out += "Role " + k + ": " + std::string(to_string(role)) + "\n";
            out += "Confidence " + k + ": " + std::to_string(2 + detail::fnv1a64(q + "#") % 4) + "\n";
        }
        return out;
    }

    static std::string smoothing_output(std::string_view p) {
        std::string para;
        for (const auto &line : text::split_lines(p))
            if (starts_with(line, "Input Paragraph: "))
                para = line.substr(17);
        auto pos = para.find("[MASK]");
        if (pos != std::string::npos)
            para.erase(pos, 6);
        return "Coherent paragraph: " + text::normalize_whitespace(para);
    }

    std::string zero_shot_output(std::string_view p, bool continuing) const {
        std::vector<std::string> lines = text::split_lines(p);
        ParsedInput in;
        for (std::size_t i = 0; i + 1 < lines.size(); ++i)
            if (starts_with(lines[i], "Title: ")) {
                in.title = lines[i].substr(7);
                in.sentences = segment_sentences(lines[i + 1]);
                break;
            }
        std::string out;
        int k = 0;
        for (int a : anchor_positions(in.sentences.size(), continuing)) {
            auto kws = keywords_for(in, a);
            out += "Output " + std::to_string(++k) + ":\n";
            out += "Position: " + sentence_at(in, a) + "\n";
            out += "Answer Keywords: " + text::join(kws, ", ") + "\n";
            out += "Question: " + question_for(kws, sentence_at(in, a)) + "\n\n";
        }
        return out;
    }

    static std::string judge_output(std::string_view p) {
        std::string out = "Explanations:\n";
        std::vector<std::string> summaries(3);
        for (const auto &line : text::split_lines(p))
            for (int i = 1; i <= 3; ++i)
                if (starts_with(line, "Summary " + std::to_string(i) + ": "))
                    summaries[static_cast<std::size_t>(i - 1)] = line.substr(11);
        for (int i = 1; i <= 3; ++i)
            out += "Analysis of summary " + std::to_string(i) + ": Scored by a fixed rule.\n";
        out += "\nScores:\n";
        for (int i = 1; i <= 3; ++i) {
            auto h = detail::fnv1a64(summaries[static_cast<std::size_t>(i - 1)]) % 41;
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.1f", 1.0 + static_cast<double>(h) / 10.0);
            out += "Score for summary " + std::to_string(i) + ": " + buf + "\n";
        }
        return out;
    }

    FinetunedModels models_;
    std::size_t dim_;
};

} // namespace gq
