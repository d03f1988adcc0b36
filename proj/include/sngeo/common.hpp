#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sngeo {

/// Thrown when an operation receives parameters outside its documented domain.
class invalid_parameter : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a field with a singular kernel is evaluated (numerically) on top
/// of an atom. Callers decide whether to re-jitter the query point.
class singular_evaluation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown for token configurations with tangencies (circle/circle or
/// circle/window) below geometric tolerance; callers resample.
class degenerate_configuration : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a sample is unusable for the requested statistic (e.g. zero
/// variance under plug-in standardization).
class degenerate_sample : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Pairwise tree reduction with fixed bracketing. The result depends only on
// the element order, never on thread count or chunking, so estimator
// reductions stay deterministic.
inline double pairwise_sum(std::span<const double> x) {
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw invalid_parameter("mean: empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample variance (divisor n-1).
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw invalid_parameter("sample_variance: need n >= 2");
    const double m = mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

}  // namespace sngeo
