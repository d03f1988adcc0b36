#include "sngeo/random.hpp"

#include <cmath>

namespace sngeo {

namespace {

std::uint64_t poisson_knuth(std::mt19937_64& g, double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t n = 0;
    double prod = uniform01(g);
    while (prod > limit) {
        ++n;
        prod *= uniform01(g);
    }
    return n;
}

// PTRS: W. Hormann, "The transformed rejection method for generating Poisson
// random variables" (1993). Valid for mean >= 10; we switch at 30.
std::uint64_t poisson_ptrs(std::mt19937_64& g, double mean) {
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        double u = uniform01(g) - 0.5;
        const double v = uniform01(g);
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = k * log_mean - mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(k);
    }
}

}  // namespace

std::uint64_t sample_poisson_count(std::mt19937_64& g, double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw invalid_parameter("sample_poisson_count: mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_knuth(g, mean);
    return poisson_ptrs(g, mean);
}

}  // namespace sngeo
