#pragma once

#include "gq/error.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace gq {

// Replaces every "{name}" with its value. Unknown placeholders are left as-is.
inline std::string render_template(std::string_view tmpl, const std::map<std::string, std::string> &values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

namespace prompt_defaults {

inline constexpr std::string_view kCompletion = R"([Task Description]
You will be given some questions extracted from an article and their surrounding texts. Your task is to check whether these questions are self-contained. For example, "What constitutes such a code?" is not a self-contained question due to the unclear "code". If a question is not self-contained, complete it based on its context; otherwise, output it as it is.

[Input]
{items}

[Output] (Please strictly organize your output in the following format)
Question 1: <complete question 1>
...
)";

inline constexpr std::string_view kAnswering = R"([Task Description]
You will be given an article and some questions. In particular, these questions are posed in the article and highlighted by a marker "[Question]" before them. Your task is to answer these questions based on the article. Start by reading the article carefully and locating the given questions. For each question, check whether it is answered in the article. If not, output "no answer"; otherwise, provide an answer that should be as detailed as possible and faithful to the article. Finally, provide a confidence level from 1 to 5 for each generated answer, where 1 is the lowest and 5 is the highest.

[Input]
Article: {article}
{items}

[Output] (Please strictly organize your output in the following format)
Answer 1: <answer to question 1>
Confidence 1: <confidence level, 1-5>
...
)";

inline constexpr std::string_view kRoleIdentification = R"([Task Description]
You will be given an article and some questions. In particular, these questions are presented in the article and play different roles. Your task is to identify their role. The definition and example of each question role are described below.
{role_definitions}
Make sure you understand the above instructions clearly. Start by reading the article carefully and locating the positions of the given questions. Check each question-answer pair and write down your analysis about its role based on the above definition. Finally, output its role and provide a confidence level from 1 to 5 for your judgment, where 1 is the lowest and 5 is the highest.

[Input]
Article: {article}
{items}

[Output]
Analysis 1: <analysis for the role of question 1>
Role 1: <role of question 1>
Confidence 1: <confidence of output, 1-5>
...
)";

inline constexpr std::string_view kRoleDefinitions = R"(Frame Purpose: raised near the beginning to set the agenda of the article and announce the central topics it will explore. Example: "Can the method be applied without surgery? Does it generalize to other tissues?" followed by a description of the study.
Organize Discourse: works like a subheading that introduces the next section and signals a shift of topic; such questions often recur through the article. Example: "What are the costs of remote work?" opening a section about costs.
Establish Claim: introduces the writer's own argument and is answered right away in the text. Example: "Why do firms value reputation? Because trust lowers the cost of every transaction."
Provoke Thought: a genuine question the article does not answer, left to the reader's reflection. Example: "How much freedom should citizens trade for security?"
Use one of: Frame Purpose, Organize Discourse, Establish Claim, Provoke Thought.)";

inline constexpr std::string_view kSmoothing = R"([Task Description]
Given a paragraph where a sentence has been removed and replaced with "[MASK]," your task is to assess whether the paragraph remains coherent without the missing sentence. If yes, simply remove the [MASK] token. If not, please edit the text around [MASK] to restore its coherence. You can only make necessary and minimal edits, leaving the majority of the paragraph verbatim. You can not introduce new information or change or remove existing information.

[Input]
Input Paragraph: {paragraph}

[Output]
Coherent paragraph: <coherent paragraph>
)";

inline constexpr std::string_view kZeroShotGeneration = R"([Task Description]
Given an article, your task is to incorporate several questions into the text to enhance its readability and make it more engaging.
For each question, first determine its position in the article by copying the sentence after which the question should be raised, then provide a set of keywords of the answer to the question. Finally, generate the target question.

[Input]
{article}

[Output]
Output 1:
Position: <sentence precedes the question>
Answer Keywords: <keywords separated by ",">
Question: <question 1>

Output 2:
...
)";

inline constexpr std::string_view kSummaryJudge = R"([Task Description]
Your will be given three summaries written for an article titled "{title}". Please act as an impartial judge and evaluate the quality of these summaries in terms of {metric}. Please make sure you read and understand the following instructions carefully. Please keep this document open while reviewing and refer to it as needed.

[Evaluation Criteria]
{metric_description}

[Evaluation Steps]
Read the source article carefully and identify the main topic and key points.
Read each summary carefully. Check if the summary meets the above criteria and provide an explanation for your judgment.
Assign a {metric} score for each summary on a scale of 1 (lowest) to 5 (highest). Decimal scores are particularly encouraged.

[Input]
Article: {article}
Summary 1: {summary_1}
Summary 2: {summary_2}
Summary 3: {summary_3}

[Output] (Please strictly organize your output in the following format)
Explanations:
Analysis of summary 1: <your analysis>
Analysis of summary 2: <your analysis>
Analysis of summary 3: <your analysis>

Scores:
Score for summary 1: <score only, 1 - 5, preferably decimal>
Score for summary 2: <score only, 1 - 5, preferably decimal>
Score for summary 3: <score only, 1 - 5, preferably decimal>
)";

inline constexpr std::string_view kCoherence =
    "Coherence (1-5) - the collective quality of all sentences. The summary is well-structured and "
    "well-organized. The summary should not just be a heap of related information, but should build from "
    "sentence to sentence to a coherent body of information about a topic.";
inline constexpr std::string_view kConsistency =
    "Consistency (1-5) - the factual and conceptual alignment between the summary and the source article. The "
    "summary faithfully and precisely conveys the messages and ideas from the source material, without "
    "distortion or misinterpretation.";
inline constexpr std::string_view kInformativeness =
    "Informativeness (1-5): the extent to which the summary encapsulates the essential and relevant "
    "information. Informativeness is not merely about including various pieces of information, but selecting "
    "the most crucial elements that offer a comprehensive understanding of the topic.";

} // namespace prompt_defaults

// All prompt templates. Each can be replaced by a file of the same stem in a
// prompt directory (see PromptSet::file_names()).
struct PromptSet {
    std::string completion{prompt_defaults::kCompletion};
    std::string answering{prompt_defaults::kAnswering};
    std::string role_identification{prompt_defaults::kRoleIdentification};
    std::string role_definitions{prompt_defaults::kRoleDefinitions};
    std::string smoothing{prompt_defaults::kSmoothing};
    std::string zero_shot_generation{prompt_defaults::kZeroShotGeneration};
    std::string summary_judge{prompt_defaults::kSummaryJudge};

    static const std::map<std::string, std::string PromptSet::*> &file_names() {
        static const std::map<std::string, std::string PromptSet::*> names = {
            {"completion.txt", &PromptSet::completion},
            {"answering.txt", &PromptSet::answering},
            {"role_identification.txt", &PromptSet::role_identification},
            {"role_definitions.txt", &PromptSet::role_definitions},
            {"smoothing.txt", &PromptSet::smoothing},
            {"zero_shot_generation.txt", &PromptSet::zero_shot_generation},
            {"summary_judge.txt", &PromptSet::summary_judge},
        };
        return names;
    }

    // Files missing from `dir` keep their default text.
    static PromptSet load_dir(const std::filesystem::path &dir) {
        if (!std::filesystem::is_directory(dir))
            throw IoError("prompt directory not found: " + dir.string());
        PromptSet set;
        for (const auto &[name, member] : file_names()) {
            auto path = dir / name;
            if (!std::filesystem::exists(path))
                continue;
            std::ifstream in(path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            set.*member = ss.str();
        }
        return set;
    }

    void write_dir(const std::filesystem::path &dir) const {
        std::filesystem::create_directories(dir);
        for (const auto &[name, member] : file_names()) {
            std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
            out << this->*member;
        }
    }
};

} // namespace gq
