#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sngeo/estimators.hpp"

namespace sngeo {

/// Configuration problem: the message names the offending section.key.
class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat experiment configuration. Parsed from the key-value text format
/// ([section] headers, key = value lines, '#' comments) or from JSON with one
/// object per section. All randomness derives from run.seed.
struct ExperimentConfig {
    // [run]
    std::uint64_t seed = 0;
    int dim = 2;
    int threads = 0;  // 0: leave the OpenMP default
    std::string out_dir = "out";

    // [window]
    std::vector<double> sides;

    // [field] kernel: radial-power | radial-smooth | token
    std::string kernel = "radial-power";
    double nu = 0.5;
    double lambda = 23.0;
    double amplitude = 1.0;
    double eps_tail = 1e-8;
    double rate = 1.0;
    double gamma = 1.5;

    // [marks] kind: unit | scalar | disc | kernel
    std::string marks = "kernel";
    std::vector<double> amp_values{1.0};
    std::vector<double> amp_probs{1.0};
    double radius_min = 0.35;
    double radius_max = 0.9;

    // [functional]
    std::string functional = "score-sum";
    double level = 1.0;
    int k = 1;
    double grid_spacing = 0.125;
    std::string input = "finite";
    double test_center = 1.0;
    double test_width = 1.0;
    int quad_order = 16;
    std::string score = "count";

    // [estimators]
    std::int64_t replicates = 1000;
    int K = 4;
    double R_int = 8.0;
    double radial_step = 0.25;
    std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
    std::int64_t anticonc_n = 200000;
    double failure_budget = 0.001;
    std::string sigma0_method = "both";

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);

    /// Canonical text form: every section and key in fixed order, reals with
    /// 17 significant digits. parse_text(canonical_text()) reproduces the
    /// config exactly.
    std::string canonical_text() const;

    FieldSpec field_spec() const;
    FunctionalSpec functional_spec() const;
    MarkDistribution mark_distribution() const;
};

/// Runs one subcommand: writes report.json plus per-table CSVs into out_dir.
/// Returns 0 on success, 2 on validation errors, 3 on replicate-budget
/// breach. `name` is one of sample, field-grid, functional, variance-scan,
/// sigma0, clt, anticonc.
int run_subcommand(const std::string& name, const ExperimentConfig& config);

}  // namespace sngeo
