#include "uq/graders.hpp"

#include <cctype>
#include <charconv>

#include "uq/text.hpp"

namespace uq::graders {

std::string to_string(GraderKind kind) {
    switch (kind) {
        case GraderKind::math: return "math";
        case GraderKind::multiple_choice: return "multiple_choice";
        case GraderKind::short_answer: return "short_answer";
        case GraderKind::manual: return "manual";
    }
    throw ContractViolation("unknown GraderKind");
}

GraderKind grader_kind_from_string(const std::string& s) {
    if (s == "math") return GraderKind::math;
    if (s == "multiple_choice") return GraderKind::multiple_choice;
    if (s == "short_answer") return GraderKind::short_answer;
    if (s == "manual") return GraderKind::manual;
    throw InputError("unknown grader kind: " + s);
}

std::optional<long long> leading_integer(const std::string& response) {
    std::size_t i = 0;
    while (i < response.size() && std::isspace(static_cast<unsigned char>(response[i]))) ++i;
    std::size_t begin = i;
    if (i < response.size() && (response[i] == '-' || response[i] == '+')) ++i;
    std::size_t digits_begin = i;
    while (i < response.size() && std::isdigit(static_cast<unsigned char>(response[i]))) ++i;
    if (i == digits_begin) return std::nullopt;
    // "3.5" is a decimal, not an integer; "42." is an integer plus punctuation.
    if (i < response.size() && response[i] == '.' && i + 1 < response.size() &&
        std::isdigit(static_cast<unsigned char>(response[i + 1]))) {
        return std::nullopt;
    }
    const char* first = response.data() + begin;
    const char* last = response.data() + i;
    if (response[begin] == '+') ++first;  // from_chars accepts '-' but not '+'
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

CorrectnessLabel grade_math(const std::string& response, long long reference) {
    const auto extracted = leading_integer(response);
    return CorrectnessLabel::from_correct(extracted && *extracted == reference);
}

CorrectnessLabel grade_multiple_choice(const std::string& response, const std::string& reference) {
    static const std::vector<std::string> kLetters = {"A", "B", "C", "D", "E"};
    bool valid_reference = false;
    for (const auto& letter : kLetters) valid_reference |= letter == reference;
    if (!valid_reference) {
        throw InputError("multiple-choice reference must be one of A..E, got '" + reference + "'");
    }
    const std::string normalized = text::to_upper(text::trim(response));
    bool in_letter_set = false;
    for (const auto& letter : kLetters) in_letter_set |= letter == normalized;
    return CorrectnessLabel::from_correct(in_letter_set && normalized == reference);
}

CorrectnessLabel grade_short_answer(const std::string& response,
                                    const std::vector<std::string>& acceptable) {
    if (acceptable.empty()) throw InputError("short-answer grading requires acceptable answers");
    const std::string normalized = text::to_lower(text::trim(response));
    for (const auto& answer : acceptable) {
        if (text::contains(normalized, text::to_lower(text::trim(answer)))) {
            return CorrectnessLabel::from_correct(true);
        }
    }
    return CorrectnessLabel::from_correct(false);
}

GradedSample grade(const ResponseRecord& record) {
    record.validate();
    GradedSample sample;
    sample.record = record;
    switch (record.prompt.task_kind) {
        case TaskKind::math: {
            if (record.prompt.reference.empty()) {
                throw InputError("prompt '" + record.prompt.id + "' has no reference answer");
            }
            const auto reference = leading_integer(record.prompt.reference.front());
            if (!reference) {
                throw DataError("prompt '" + record.prompt.id + "' has a non-integer math reference");
            }
            sample.label = grade_math(record.original.text, *reference);
            sample.grader_kind = GraderKind::math;
            break;
        }
        case TaskKind::multiple_choice: {
            if (record.prompt.reference.empty()) {
                throw InputError("prompt '" + record.prompt.id + "' has no reference answer");
            }
            sample.label =
                grade_multiple_choice(record.original.text, record.prompt.reference.front());
            sample.grader_kind = GraderKind::multiple_choice;
            break;
        }
        case TaskKind::short_answer: {
            sample.label = grade_short_answer(record.original.text, record.prompt.reference);
            sample.grader_kind = GraderKind::short_answer;
            break;
        }
        case TaskKind::freeform:
            throw ConfigError("freeform prompts need manual labels; no automatic grader applies");
    }
    return sample;
}

}  // namespace uq::graders
