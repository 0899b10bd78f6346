#pragma once

// Automatic correctness oracles for the three constrained task types, plus a
// manual-label path for everything else. Graders are practical proxies for
// answer-key correctness: they assume the model followed the task's response
// format instruction. All graders are pure and deterministic.

#include <optional>
#include <string>
#include <vector>

#include "uq/core.hpp"

namespace uq::graders {

enum class GraderKind { math, multiple_choice, short_answer, manual };

std::string to_string(GraderKind kind);
GraderKind grader_kind_from_string(const std::string& s);

struct GradedSample {
    ResponseRecord record;
    CorrectnessLabel label;
    GraderKind grader_kind = GraderKind::manual;
};

// Leading integer substring after skipping leading whitespace: optional sign,
// then contiguous digits. A decimal point followed by more digits makes the
// token a decimal, not an integer, so extraction fails; a bare trailing
// period is sentence punctuation and does not. Commas are not consumed.
// Returns empty when the text does not start with an integer.
std::optional<long long> leading_integer(const std::string& response);

// Correct iff the leading integer of the response equals the reference.
// Non-numeric or missing integer outputs grade as incorrect.
CorrectnessLabel grade_math(const std::string& response, long long reference);

// Correct iff the response, uppercased and trimmed, equals the reference
// letter exactly. Any normalized value outside {A..E} is incorrect.
// The reference must be one of A..E.
CorrectnessLabel grade_multiple_choice(const std::string& response, const std::string& reference);

// Correct iff any acceptable answer appears as a contiguous substring of the
// response, both sides lowercased and trimmed.
CorrectnessLabel grade_short_answer(const std::string& response,
                                    const std::vector<std::string>& acceptable);

// Dispatches on the prompt's task kind using its reference answer(s).
// Freeform prompts have no automatic grader and require manual labels.
GradedSample grade(const ResponseRecord& record);

}  // namespace uq::graders
