#include "uq/whitebox.hpp"

#include <algorithm>
#include <cmath>

namespace uq::whitebox {

std::optional<double> length_normalized_token_probability(const Generation& gen) {
    if (!gen.token_probs) return std::nullopt;
    gen.validate();
    const auto& probs = *gen.token_probs;
    double log_sum = 0.0;
    for (double p : probs) {
        if (p == 0.0) return 0.0;
        log_sum += std::log(p);
    }
    const double value = std::exp(log_sum / static_cast<double>(probs.size()));
    return std::clamp(value, 0.0, 1.0);
}

std::optional<double> min_token_probability(const Generation& gen) {
    if (!gen.token_probs) return std::nullopt;
    gen.validate();
    return *std::min_element(gen.token_probs->begin(), gen.token_probs->end());
}

}  // namespace uq::whitebox
