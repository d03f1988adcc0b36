#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sngeo/geometry.hpp"
#include "sngeo/point_process.hpp"

namespace sngeo {

/// Radial impulse kernel: g(rho) = C rho^-nu for rho <= 1 and an outer tail
/// for rho > 1, either C rho^-lambda (power, lambda > 11d) or
/// C exp(a (1 - rho^gamma)) (stretched exponential, gamma < d). Both outer
/// forms are continuous at rho = 1; the stretched form is C^1 there exactly
/// when nu = a * gamma.
///
/// Evaluation is truncated at trunc_radius, chosen so that the expected
/// absolute tail contribution under unit intensity is below eps_tail.
class RadialKernel {
  public:
    enum class Outer { power, stretched_exp };

    static RadialKernel power(double nu, double lambda, double amplitude, int dim,
                              double eps_tail = 1e-8);
    static RadialKernel stretched_exp(double nu, double rate, double gamma, double amplitude,
                                      int dim, double eps_tail = 1e-8);

    double value(double rho) const;
    /// dg/drho; defined away from 0 (and away from rho = 1 if the junction is
    /// only C^0, where the inner branch is used).
    double derivative(double rho) const;

    /// Expected absolute contribution of points beyond radius R under unit
    /// intensity: integral of g(rho) sigma_{d-1} rho^{d-1} over (R, inf).
    double tail_mass(double R) const;

    double inner_exponent() const { return nu_; }
    Outer outer() const { return outer_; }
    double outer_exponent() const { return lambda_; }
    double stretch_rate() const { return rate_; }
    double stretch_exponent() const { return gamma_; }
    double amplitude() const { return amplitude_; }
    double trunc_radius() const { return trunc_radius_; }
    double eps_tail() const { return eps_tail_; }
    int dim() const { return dim_; }

  private:
    RadialKernel() = default;

    double nu_ = 0.0;
    Outer outer_ = Outer::power;
    double lambda_ = 0.0;
    double rate_ = 0.0;
    double gamma_ = 0.0;
    double amplitude_ = 1.0;
    double trunc_radius_ = 0.0;
    double eps_tail_ = 0.0;
    int dim_ = 0;

    // Fast-path dispatch resolved at construction.
    int nu_ipow_ = -1;      // inner exponent doubled, when it is a half-integer
    int lambda_ipow_ = -1;  // outer power exponent, when integral
};

/// Token (dilution) kernel tag: each mark is (amplitude L != 0, disc radius
/// r > 0) and the impulse is L * indicator of the closed disc. d = 2 only.
struct TokenKernel {};

/// Kernel family plus mark law: everything needed to sample and evaluate one
/// shot-noise field. A missing radial kernel means a token field.
struct FieldSpec {
    std::optional<RadialKernel> radial;
    MarkDistribution marks = MarkDistribution::unit();

    bool is_token() const { return !radial.has_value(); }
    /// Interaction reach: kernel truncation radius, the largest grain radius,
    /// or 0 for pure point statistics.
    double reach() const {
        if (radial) return radial->trunc_radius();
        return marks.max_radius();
    }
};

/// Uniform-cell spatial index over a configuration. Candidate enumeration is
/// canonical: cells in lexicographic order, points within a cell in
/// configuration (lexicographic) order. Every field evaluation accumulates in
/// this order, which makes results independent of thread count.
class PointIndex {
  public:
    explicit PointIndex(const MarkedConfiguration& config);

    const MarkedConfiguration& config() const { return *config_; }
    double max_mark_radius() const { return max_mark_radius_; }

    /// Invokes fn(point_index) for every point whose cell intersects the ball
    /// B(y, radius), in canonical order. Callers filter by exact distance.
    template <typename Fn>
    void for_each_candidate(std::span<const double> y, double radius, Fn&& fn) const;

  private:
    std::int64_t cell_key(std::span<const int> c) const;

    const MarkedConfiguration* config_ = nullptr;
    int dim_ = 0;
    double max_mark_radius_ = 0.0;
    std::unordered_map<std::int64_t, std::vector<std::int32_t>> cells_;
};

/// Shot-noise field evaluator bound to one configuration.
class FieldEvaluator {
  public:
    FieldEvaluator(const MarkedConfiguration& config, const RadialKernel& kernel);
    FieldEvaluator(const MarkedConfiguration& config, TokenKernel);

    bool is_token() const { return !radial_.has_value(); }
    const PointIndex& index() const { return index_; }

    /// f_zeta(y). Radial kernels throw singular_evaluation when y is within
    /// 1e-12 of an atom.
    double value(std::span<const double> y) const;

    /// Gradient of f_zeta at y (radial kernels only).
    std::vector<double> gradient(std::span<const double> y) const;

    /// Token fields: value at y excluding up to two discs by point index
    /// (used for jump base values f^- at points lying on those circles).
    double value_excluding(std::span<const double> y, std::int64_t skip0,
                           std::int64_t skip1 = -1) const;

  private:
    const MarkedConfiguration* config_;
    std::optional<RadialKernel> radial_;
    PointIndex index_;
};

/// Convenience single-shot evaluations (build a transient evaluator).
double eval_field(const MarkedConfiguration& config, const RadialKernel& kernel,
                  std::span<const double> y);
double eval_field(const MarkedConfiguration& config, TokenKernel,
                  std::span<const double> y);
std::vector<double> eval_gradient(const MarkedConfiguration& config,
                                  const RadialKernel& kernel, std::span<const double> y);

/// Sampled field over the fill of a box window: per cell axis, 1/h nodes at
/// half-spacing offsets (midpoint layout), row-major storage (last axis
/// fastest). Node coordinates carry a fixed documented jitter of
/// (2.5e-10, 1.5e-10, 0.5e-10) per axis so nodes never coincide with atoms.
class FieldGrid {
  public:
    FieldGrid() = default;

    int dim() const { return dim_; }
    double spacing() const { return spacing_; }
    std::span<const std::int64_t> extents() const { return extents_; }
    std::int64_t node_count() const { return static_cast<std::int64_t>(values_.size()); }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mut() { return values_; }
    bool has_gradients() const { return !gradients_.empty(); }
    std::span<const double> gradients() const { return gradients_; }
    std::span<double> gradients_mut() { return gradients_; }

    /// Window cell box lower corner (cells lo..hi per axis).
    std::span<const int> window_lo() const { return window_lo_; }
    std::span<const int> window_hi() const { return window_hi_; }
    std::int64_t nodes_per_cell_axis() const { return nodes_per_cell_axis_; }

    double origin(int axis) const { return window_lo_[axis] - 0.5; }
    /// Coordinate of node j on the given axis (jitter included).
    double node_coord(int axis, std::int64_t j) const;
    void node_coords(std::int64_t flat, std::vector<double>& out) const;
    double value_at(std::span<const std::int64_t> idx) const;
    std::int64_t flat_index(std::span<const std::int64_t> idx) const;

    void write_binary(std::ostream& os) const;
    static FieldGrid read_binary(std::istream& is);
    void write_csv(std::ostream& os) const;

    /// Empty grid with the layout implied by window and spacing; spacing must
    /// divide 1 and the window fill must be a box.
    static FieldGrid allocate(const LatticeWindow& window, double spacing,
                              bool with_gradients);

  private:
    int dim_ = 0;
    double spacing_ = 0.0;
    std::int64_t nodes_per_cell_axis_ = 0;
    std::vector<int> window_lo_, window_hi_;
    std::vector<std::int64_t> extents_;
    std::vector<double> values_;
    std::vector<double> gradients_;  // empty unless requested; d entries per node
};

/// Builds the field grid with OpenMP-parallel node loops.
FieldGrid build_grid(const MarkedConfiguration& config, const RadialKernel& kernel,
                     const LatticeWindow& window, double spacing,
                     bool with_gradients = false);
FieldGrid build_grid(const MarkedConfiguration& config, TokenKernel,
                     const LatticeWindow& window, double spacing);

/// Serial reference implementation; identical output, kept for testing and
/// benchmarking against the parallel kernels.
FieldGrid build_grid_serial(const MarkedConfiguration& config, const RadialKernel& kernel,
                            const LatticeWindow& window, double spacing,
                            bool with_gradients = false);
FieldGrid build_grid_serial(const MarkedConfiguration& config, TokenKernel,
                            const LatticeWindow& window, double spacing);

template <typename Fn>
void PointIndex::for_each_candidate(std::span<const double> y, double radius, Fn&& fn) const {
    std::array<int, 4> clo{}, chi{}, c{};
    for (int i = 0; i < dim_; ++i) {
        clo[i] = static_cast<int>(std::floor(y[i] - radius));
        chi[i] = static_cast<int>(std::floor(y[i] + radius));
        c[i] = clo[i];
    }
    for (;;) {
        auto it = cells_.find(cell_key({c.data(), static_cast<std::size_t>(dim_)}));
        if (it != cells_.end()) {
            for (std::int32_t p : it->second) fn(p);
        }
        int axis = dim_ - 1;
        while (axis >= 0) {
            if (++c[axis] <= chi[axis]) break;
            c[axis] = clo[axis];
            --axis;
        }
        if (axis < 0) break;
    }
}

}  // namespace sngeo
