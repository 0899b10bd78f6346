#pragma once

// Token-probability confidence scorers computed from a single generation.
// Both return values in [0, 1]; a generation without token probabilities
// yields MISSING (empty optional). Stable scorer names: "lntp", "mtp".

#include <optional>

#include "uq/core.hpp"

namespace uq::whitebox {

// Geometric mean of the token probabilities, computed in log space:
// exp((1/L) sum log p_t). Any zero probability makes the result exactly 0.
std::optional<double> length_normalized_token_probability(const Generation& gen);

// Minimum token probability.
std::optional<double> min_token_probability(const Generation& gen);

}  // namespace uq::whitebox
