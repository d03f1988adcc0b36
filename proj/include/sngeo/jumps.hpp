#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sngeo/field.hpp"

namespace sngeo {

/// One arc of a disc boundary circle, delimited by intersections with other
/// circles and with the window boundary. Along a single arc no other circle
/// is crossed, so the field value without the own disc is constant; it is
/// recorded at the arc midpoint as base_value (the jump is base_value ->
/// base_value + amplitude when entering the disc).
struct Arc {
    std::int64_t disc = 0;        // index of the disc in the configuration
    double theta0 = 0.0;          // CCW angular interval [theta0, theta1]
    double theta1 = 0.0;
    double length = 0.0;          // r * (theta1 - theta0)
    std::array<double, 2> midpoint{};
    bool inside_window = false;   // midpoint strictly inside the fill
    double base_value = 0.0;      // f^- at the midpoint, own disc excluded
};

/// Circle/circle intersection point, with the field value excluding both
/// participating discs. Used for the corner terms of the total curvature.
struct CircleCrossing {
    std::int64_t disc_a = 0;
    std::int64_t disc_b = 0;
    std::array<double, 2> location{};
    double base_value = 0.0;      // f excluding both discs
    bool inside_window = false;
};

/// Jump set of a token shot-noise field over a box window: every disc
/// boundary circle split into arcs at circle/circle and circle/window
/// crossings. Arc lengths per circle sum to the full circumference; window
/// clipping is recorded per arc via the midpoint rule.
struct JumpStructure {
    MarkedConfiguration config;   // the token configuration (disc marks)
    std::vector<int> window_lo, window_hi;  // box window cells
    std::vector<Arc> arcs;                  // grouped by disc, CCW order
    std::vector<CircleCrossing> crossings;

    double fill_xmin() const { return window_lo[0] - 0.5; }
    double fill_xmax() const { return window_hi[0] + 0.5; }
    double fill_ymin() const { return window_lo[1] - 0.5; }
    double fill_ymax() const { return window_hi[1] + 0.5; }
};

/// Builds the jump structure of a token configuration over a box window.
/// Throws degenerate_configuration when two circles are tangent, a circle is
/// tangent to a window boundary line, or split points collapse, all within
/// the geometric tolerance; callers resample.
JumpStructure build_jump_structure(const MarkedConfiguration& config,
                                   const LatticeWindow& window, double tolerance = 1e-9);

}  // namespace sngeo
