#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "sngeo/field.hpp"
#include "sngeo/jumps.hpp"

namespace sngeo {

enum class FunctionalKind {
    excursion_volume,
    fixed_level_perimeter,
    weighted_perimeter,
    total_curvature,
    nn_length,
    score_sum,
};

/// finite: only points falling in the window fill contribute (boundary
/// effects); infinite: all points contribute, approximated by sampling on the
/// fill padded by the field reach.
enum class InputMode { finite, infinite };

/// Named score functions shipped for the score-sum form.
enum class ScoreKind { count, zero, nn_phi };

struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::score_sum;
    double level = 0.0;          // excursion threshold u
    int k = 1;                   // neighbour order
    double grid_spacing = 0.125; // 2^-m, m >= 3
    InputMode input = InputMode::finite;
    double test_center = 1.0;    // weighted perimeter bump parameters
    double test_width = 1.0;
    int quad_order = 16;
    ScoreKind score = ScoreKind::count;

    /// Checks the declared invariants (finite level, k >= 1, dyadic spacing).
    void validate() const;
};

/// Excursion volume over the grid window: spacing^d times the number of nodes
/// with value >= u (node counting; one node per spacing^d of fill).
double excursion_volume(const FieldGrid& grid, double u);

/// Level-u isoline length by marching squares with linear interpolation along
/// cell edges (d = 2). Extracted segments are chained into contours and
/// closed contours are vertex-smoothed over a spacing-scaled window before
/// measuring, which removes the staircase bias on jump fields.
double fixed_level_perimeter_grid(const FieldGrid& grid, double u);

/// Exact fixed-level perimeter of a token excursion from the jump structure:
/// total length of arcs where the excursion indicator flips across the
/// circle, clipped to the open window fill.
double fixed_level_perimeter_token(const JumpStructure& js, double u);

struct CurvatureArc {
    std::int64_t disc = 0;
    double theta0 = 0.0, theta1 = 0.0;
    double curvature = 0.0;  // +1/r with the excursion inside the disc, else -1/r
    double length = 0.0;     // length inside the open fill (0 when clipped out)
};

struct CurvatureCorner {
    std::array<double, 2> location{};
    double angle = 0.0;  // turning angle in (-pi, pi), excursion on the left
};

struct CurvatureDecomposition {
    std::vector<CurvatureArc> arcs;
    std::vector<CurvatureCorner> corners;
    double total = 0.0;  // sum of curvature * length plus corner angles
};

/// Total curvature of the token excursion boundary within the open fill.
/// Boundary is oriented with the excursion on the left; for excursions whose
/// closure lies inside the window, total / 2 pi is the Euler characteristic.
CurvatureDecomposition total_curvature(const JumpStructure& js, double u);

/// Smooth compactly supported bump h_{c,w}(t) = exp(1/(((t-c)/w)^2 - 1)) on
/// |t - c| < w, with its primitive precomputed by per-panel Gauss-Legendre
/// quadrature (cached cumulative sums, on-demand partial panels).
class TestFunction {
  public:
    static TestFunction bump(double center, double width);

    double value(double t) const;
    double primitive(double t) const;  // H(t) = integral of h over (-inf, t]
    double support_lo() const { return center_ - width_; }
    double support_hi() const { return center_ + width_; }
    double center() const { return center_; }
    double width() const { return width_; }

  private:
    TestFunction() = default;
    double raw(double t) const;

    double center_ = 0.0, width_ = 1.0;
    std::vector<double> cum_;  // cumulative integral at panel boundaries
    int panels_ = 0;
};

/// Weighted-perimeter continuous part: midpoint-rule quadrature of
/// h(f(x)) ||grad f(x)|| over the window fill at the given grid spacing.
double weighted_perimeter_cont(const MarkedConfiguration& config, const RadialKernel& kernel,
                               const LatticeWindow& window, const TestFunction& h,
                               double grid_spacing);

/// Weighted-perimeter jump part: per-arc Gauss-Legendre quadrature (order
/// quad_order >= 8) of H(f_upper) - H(f_lower) along the jump set inside the
/// window, where the two one-sided values differ by the disc amplitude.
double weighted_perimeter_jump(const JumpStructure& js, const TestFunction& h,
                               int quad_order = 16);

/// Generic score-sum functional: sum over points of the configuration lying
/// in the window fill of score(mark, configuration recentred at the point).
double score_sum(const MarkedConfiguration& config, const LatticeWindow& window,
                 const std::function<double(const Mark&, const MarkedConfiguration&)>& score);

}  // namespace sngeo
