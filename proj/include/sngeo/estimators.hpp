#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sngeo/functionals.hpp"
#include "sngeo/nn.hpp"

namespace sngeo {

/// Thrown when more than the allowed fraction of replicates abort.
class replicate_failure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Evaluates one functional on one sampled configuration. For finite input
/// the configuration is expected to live on the window fill, for infinite
/// input on the padded fill; all points of the configuration contribute.
double evaluate_functional(const FunctionalSpec& spec, const FieldSpec& field,
                           const LatticeWindow& window, const MarkedConfiguration& config);

/// The sampling region matching the spec's input mode.
Region sampling_region(const FunctionalSpec& spec, const FieldSpec& field,
                       const LatticeWindow& window);

struct SampleBatch {
    std::uint64_t master_seed = 0;
    std::uint64_t context = 0;
    std::vector<double> values;                  // one per completed replicate
    std::vector<std::uint64_t> aborted_streams;  // stream indices of aborts
};

/// n independent replicates: replicate r uses stream index (context << 32) + r,
/// so batches with distinct contexts are independent and every replicate is
/// reproducible in isolation. Degenerate token configurations are resampled
/// on retry substreams; other errors abort the replicate, and the batch fails
/// once aborts exceed failure_budget * n.
SampleBatch replicate(const FunctionalSpec& spec, const FieldSpec& field,
                      const LatticeWindow& window, std::int64_t n, std::uint64_t master_seed,
                      std::uint64_t context = 0, double failure_budget = 0.001);

/// Serial reference implementation (identical output).
SampleBatch replicate_serial(const FunctionalSpec& spec, const FieldSpec& field,
                             const LatticeWindow& window, std::int64_t n,
                             std::uint64_t master_seed, std::uint64_t context = 0,
                             double failure_budget = 0.001);

/// Batch count used for every batched standard error in the library.
inline constexpr int kBatchCount = 25;

/// Standard error of an estimator by batching: statistic recomputed on
/// kBatchCount consecutive sub-batches, SE = sd(batch values) / sqrt(B).
double batched_se(std::span<const double> values, double (*statistic)(std::span<const double>));

struct VarianceRow {
    double side = 0.0;       // window side a
    double cells = 0.0;      // |W|
    double variance = 0.0;   // unbiased sample variance of F_W
    double var_per_cell = 0.0;
    double se_var_per_cell = 0.0;
    std::int64_t replicates = 0;
};

/// Variance scaling table over increasing window sides (n >= 500 per size).
std::vector<VarianceRow> variance_scan(const FunctionalSpec& spec, const FieldSpec& field,
                                       std::span<const double> sides, std::int64_t n_per_size,
                                       std::uint64_t master_seed);

struct Sigma0Estimate {
    std::string method;          // "cov-series" or "volume-integral"
    double raw = 0.0;            // may be negative before flooring
    double floored = 0.0;        // max(raw, 0)
    double se = 0.0;
    double truncation = 0.0;     // lattice radius K or integral radius R_int
    double tail_indicator = 0.0; // max |cov| on the truncation shell, or tail integrand
    bool tail_warning = false;
    std::int64_t replicates = 0;
};

/// Covariance-series estimator of sigma_0^2: shared padded configurations
/// give every lattice shift F_k per replicate (common random numbers), and
/// the series is truncated at lattice radius K.
Sigma0Estimate sigma0_cov_series(const FunctionalSpec& spec, const FieldSpec& field, int K,
                                 std::int64_t n, std::uint64_t master_seed,
                                 std::uint64_t context = 1);

/// Exceedance-covariance integral estimator of sigma_0^2 for excursion
/// volume: joint exceedance probabilities on a radial grid, integrated with
/// the radial measure sigma_{d-1} rho^{d-1} drho up to R_int.
Sigma0Estimate sigma0_volume_integral(const FieldSpec& field, int dim, double u, double R_int,
                                      std::int64_t n, std::uint64_t master_seed,
                                      std::uint64_t context = 2, double radial_step = 0.25);

enum class Standardization { known, plug_in };

double normal_cdf(double t);

/// One-sample Kolmogorov-Smirnov distance of the standardized sample to the
/// standard normal, evaluated from both sides at every sample point. With
/// plug-in standardization the first half of the sample estimates (mu, sigma)
/// and the statistic is computed on the held-out second half.
double kolmogorov_distance(std::span<const double> values, Standardization how,
                           double mu = 0.0, double sigma = 1.0);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_norm = 0.0;
    std::vector<std::size_t> excluded;  // indices with non-positive d_K
};

/// OLS fit of log d_K against log |W| (at least 3 usable sizes).
RateFit rate_fit(std::span<const double> cells, std::span<const double> dk);

/// Largest empirical mass of an open interval of width 2 delta, over a sorted
/// sample.
double sup_interval_mass(std::span<const double> sorted_values, double delta);

struct AntiConcentrationRow {
    double delta = 0.0;
    double sup_mass = 0.0;
};

/// Sliding-window anti-concentration table for the field marginal at the
/// origin, from n >= 1e5 padded-region field evaluations.
std::vector<AntiConcentrationRow> anti_concentration(const FieldSpec& field, int dim,
                                                     std::span<const double> deltas,
                                                     std::int64_t n, std::uint64_t master_seed,
                                                     std::uint64_t context = 3);

/// The n field values at the origin used by anti_concentration (sorted).
std::vector<double> origin_field_sample(const FieldSpec& field, int dim, std::int64_t n,
                                        std::uint64_t master_seed, std::uint64_t context = 3);

}  // namespace sngeo
