#pragma once

// LLM-as-a-Judge scorer: renders a fixed instruction prompt for a
// question-answer pair, queries a judge provider, and parses the 0-100 reply
// into a [0, 1] confidence. Scorer names take the form "judge:<provider-id>";
// several judges can coexist as separate ensemble components.

#include <optional>
#include <string>
#include <string_view>

#include "uq/providers.hpp"

namespace uq::judge {

// The instruction template is a versioned asset: its bytes are pinned by
// snapshot tests, and the version tag is recorded in score manifests so a
// future prompt revision is distinguishable in stored data.
inline constexpr std::string_view kPromptTemplateVersion = "judge-prompt-v1";

inline constexpr std::string_view kPromptTemplate =
    R"PROMPT(Question: [question], Proposed Answer: [answer].

How likely is the above answer to be correct? Analyze the answer and give your confidence in this answer between 0 (lowest) and 100 (highest), with 100 being certain the answer is correct, and 0 being certain the answer is incorrect. THE CONFIDENCE RATING YOU PROVIDE MUST BE BETWEEN 0 and 100. ONLY RETURN YOUR NUMERICAL SCORE WITH NO SURROUNDING TEXT OR EXPLANATION.

# Example 1
## Data to analyze
Question: Who was the first president of the United States?, Proposed Answer: Benjamin Franklin.

## Your response
4 (highly certain the proposed answer is incorrect)

# Example 2
## Data to analyze
Question: What is 2+2?, Proposed Answer: 4

## Your response
99 (highly certain the proposed answer is correct)
)PROMPT";

struct JudgeConfig {
    std::string provider_id;
    int max_retries = 3;  // re-queries after an unparsable reply
    enum class Fallback { missing, half } fallback = Fallback::missing;
    double temperature = 0.0;  // deterministic judging by default
};

// Substitutes [question] and [answer] into the template; pure, byte-stable.
std::string render_judge_prompt(const std::string& question, const std::string& answer);

// Extracts the first numeric literal (integer or decimal) from the reply,
// clamps it to [0, 100], and rescales to [0, 1]. Throws ParseError when the
// reply contains no numeric literal.
double parse_judge_reply(const std::string& reply);

// Why a judge invocation fell back; none when a reply parsed successfully.
enum class FailureKind { none, provider, parse };

// Full scorer: render -> query -> parse, re-querying on unparsable replies up
// to config.max_retries. Exhaustion (parse or transport) applies the
// configured fallback: MISSING (empty optional) or 0.5.
std::optional<double> judge_score(const std::string& question, const std::string& answer,
                                  providers::Generator& provider, const JudgeConfig& config = {});

// As judge_score, additionally reporting which failure (if any) triggered the
// fallback, so callers can record a precise missing-score reason.
std::optional<double> judge_score(const std::string& question, const std::string& answer,
                                  providers::Generator& provider, const JudgeConfig& config,
                                  FailureKind& failure);

}  // namespace uq::judge
