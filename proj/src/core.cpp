#include "uq/core.hpp"

#include <cmath>

namespace uq {

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::math: return "math";
        case TaskKind::multiple_choice: return "multiple_choice";
        case TaskKind::short_answer: return "short_answer";
        case TaskKind::freeform: return "freeform";
    }
    throw ContractViolation("unknown TaskKind");
}

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "math") return TaskKind::math;
    if (s == "multiple_choice") return TaskKind::multiple_choice;
    if (s == "short_answer") return TaskKind::short_answer;
    if (s == "freeform") return TaskKind::freeform;
    throw InputError("unknown task_kind: " + s);
}

void PromptRecord::validate() const {
    if (id.empty()) throw ContractViolation("PromptRecord.id must be non-empty");
    if (text.empty()) throw ContractViolation("PromptRecord.text must be non-empty");
}

void Generation::validate() const {
    if (!token_probs) return;
    if (token_probs->empty()) {
        throw ContractViolation("Generation.token_probs present but empty");
    }
    for (double p : *token_probs) {
        if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p)) {
            throw ContractViolation("Generation.token_probs entry outside [0, 1]");
        }
    }
}

void ResponseRecord::validate() const {
    prompt.validate();
    original.validate();
    for (const Generation& g : candidates) g.validate();
    if (!(sampling_temperature > 0.0)) {
        throw ContractViolation("ResponseRecord.sampling_temperature must be > 0");
    }
}

void ScoreVector::set(const std::string& name, double value) {
    if (!(value >= 0.0 && value <= 1.0) || !std::isfinite(value)) {
        throw ContractViolation("score for '" + name + "' outside [0, 1]");
    }
    missing.erase(name);
    values[name] = value;
}

void ScoreVector::set_missing(const std::string& name, const std::string& reason) {
    values.erase(name);
    missing[name] = reason;
}

double ScoreVector::at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw ContractViolation("score '" + name + "' is not present");
    return it->second;
}

std::optional<double> ScoreVector::get(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

bool ScoreVector::knows(const std::string& name) const {
    return values.count(name) != 0 || missing.count(name) != 0;
}

void CorrectnessLabel::validate() const {
    if ((is_correct != 0 && is_correct != 1) || (h != 0 && h != 1)) {
        throw ContractViolation("CorrectnessLabel fields must be binary");
    }
    if (h != 1 - is_correct) {
        throw ContractViolation("CorrectnessLabel requires h = 1 - is_correct");
    }
}

void EnsembleConfig::validate() const {
    validate_simplex(weights);
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ContractViolation("EnsembleConfig.threshold must lie in (0, 1)");
    }
}

const std::map<std::string, double>& validate_simplex(const std::map<std::string, double>& weights) {
    if (weights.empty()) throw SimplexViolation("weight map is empty");
    double sum = 0.0;
    for (const auto& [name, w] : weights) {
        if (!std::isfinite(w)) throw SimplexViolation("weight for '" + name + "' is not finite");
        if (w < 0.0) throw SimplexViolation("weight for '" + name + "' is negative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kSimplexTolerance) {
        throw SimplexViolation("weights sum to " + std::to_string(sum) + ", expected 1");
    }
    return weights;
}

int predict_hallucination(double score, double threshold) {
    if (!(score >= 0.0 && score <= 1.0) || !std::isfinite(score)) {
        throw ContractViolation("predict_hallucination: score outside [0, 1]");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ContractViolation("predict_hallucination: threshold outside (0, 1)");
    }
    return score < threshold ? 1 : 0;
}

}  // namespace uq
