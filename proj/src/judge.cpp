#include "uq/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "uq/errors.hpp"

namespace uq::judge {

namespace {

void replace_first(std::string& haystack, std::string_view placeholder, const std::string& value) {
    const std::size_t pos = haystack.find(placeholder);
    if (pos == std::string::npos) {
        throw ContractViolation("judge template is missing a placeholder");
    }
    haystack.replace(pos, placeholder.size(), value);
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string render_judge_prompt(const std::string& question, const std::string& answer) {
    if (question.empty() || answer.empty()) {
        throw InputError("judge prompt requires non-empty question and answer");
    }
    std::string prompt{kPromptTemplate};
    replace_first(prompt, "[question]", question);
    replace_first(prompt, "[answer]", answer);
    return prompt;
}

double parse_judge_reply(const std::string& reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        const char c = reply[i];
        const bool starts_number =
            is_digit(c) ||
            ((c == '-' || c == '+' || c == '.') && i + 1 < reply.size() && is_digit(reply[i + 1]));
        if (!starts_number) continue;
        const double raw = std::strtod(reply.c_str() + i, nullptr);
        return std::clamp(raw, 0.0, 100.0) / 100.0;
    }
    throw ParseError("judge reply contains no numeric literal");
}

std::optional<double> judge_score(const std::string& question, const std::string& answer,
                                  providers::Generator& provider, const JudgeConfig& config) {
    FailureKind failure = FailureKind::none;
    return judge_score(question, answer, provider, config, failure);
}

std::optional<double> judge_score(const std::string& question, const std::string& answer,
                                  providers::Generator& provider, const JudgeConfig& config,
                                  FailureKind& failure) {
    const std::string prompt = render_judge_prompt(question, answer);
    providers::GenerationRequest request;
    request.prompt = prompt;
    request.temperature = config.temperature;
    request.num_samples = 1;

    failure = FailureKind::none;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        std::string reply;
        try {
            reply = providers::generate(request, provider).front().text;
        } catch (const ProviderError&) {
            failure = FailureKind::provider;
            break;  // transport retries are exhausted inside generate()
        }
        try {
            const double score = parse_judge_reply(reply);
            failure = FailureKind::none;
            return score;
        } catch (const ParseError&) {
            failure = FailureKind::parse;
        }
    }
    if (config.fallback == JudgeConfig::Fallback::half) return 0.5;
    return std::nullopt;
}

}  // namespace uq::judge
