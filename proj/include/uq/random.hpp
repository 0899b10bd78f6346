#pragma once

// Deterministic random helpers built directly on mt19937_64. The standard
// <random> distributions are implementation-defined, so using them would make
// seeded outputs differ across standard libraries; these helpers pin the exact
// sampling algorithm instead. Regression tests freeze their output.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "uq/errors.hpp"

namespace uq::rnd {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform index in [0, n). Modulo bias is negligible for the small n used
    // here (n << 2^64) and keeps the draw at one engine call.
    std::size_t index(std::size_t n) {
        if (n == 0) throw ContractViolation("Rng::index requires n > 0");
        return static_cast<std::size_t>(eng_() % n);
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform sample from the (k-1)-simplex: Dirichlet(1,...,1) via
    // normalized unit-rate exponentials.
    std::vector<double> dirichlet(std::size_t k) {
        if (k == 0) throw ContractViolation("dirichlet requires k > 0");
        std::vector<double> w(k);
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double u = 0.0;
            do {
                u = uniform();
            } while (u <= 0.0);
            w[i] = -std::log(u);
            total += w[i];
        }
        for (double& v : w) v /= total;
        return w;
    }

    // Fisher-Yates shuffle using index().
    template <class T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace uq::rnd
