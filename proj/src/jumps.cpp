#include "sngeo/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sngeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

}  // namespace

JumpStructure build_jump_structure(const MarkedConfiguration& config,
                                   const LatticeWindow& window, double tolerance) {
    if (config.dim() != 2 && !config.empty())
        throw invalid_parameter("build_jump_structure: d = 2 required");
    if (config.mark_kind() != MarkKind::disc_grain && !config.empty())
        throw invalid_parameter("build_jump_structure: token (disc) configuration required");
    if (!window.is_box() || window.dim() != 2)
        throw invalid_parameter("build_jump_structure: box window in d = 2 required");

    JumpStructure js;
    js.config = config;
    js.window_lo.assign(window.lo().begin(), window.lo().end());
    js.window_hi.assign(window.hi().begin(), window.hi().end());
    if (config.empty()) return js;

    FieldEvaluator field(js.config, TokenKernel{});
    const PointIndex& index = field.index();
    const double r_max = index.max_mark_radius();
    const double xmin = js.fill_xmin(), xmax = js.fill_xmax();
    const double ymin = js.fill_ymin(), ymax = js.fill_ymax();

    const std::int64_t n = config.size();
    for (std::int64_t i = 0; i < n; ++i) {
        const double cx = js.config.point(i)[0];
        const double cy = js.config.point(i)[1];
        const double r = js.config.mark(i).radius;
        if (!(r > 0.0) || js.config.mark(i).amplitude == 0.0)
            throw invalid_parameter("build_jump_structure: marks must have r > 0, L != 0");

        std::vector<double> angles;

        // Circle/circle crossings.
        std::array<double, 2> center{cx, cy};
        index.for_each_candidate(center, r + r_max, [&](std::int32_t jp) {
            const std::int64_t j = jp;
            if (j == i) return;
            const double ox = js.config.point(j)[0];
            const double oy = js.config.point(j)[1];
            const double rj = js.config.mark(j).radius;
            const double dx = ox - cx, dy = oy - cy;
            const double dist = std::hypot(dx, dy);
            if (dist < tolerance && std::abs(r - rj) < tolerance)
                throw degenerate_configuration("coincident circles");
            if (std::abs(dist - (r + rj)) < tolerance ||
                std::abs(dist - std::abs(r - rj)) < tolerance)
                throw degenerate_configuration("tangent circles");
            if (dist > r + rj || dist < std::abs(r - rj)) return;

            const double a = (dist * dist + r * r - rj * rj) / (2.0 * dist);
            const double h2 = r * r - a * a;
            if (h2 <= 0.0) return;  // numerically excluded by the tangency guard
            const double phi = std::atan2(dy, dx);
            const double delta = std::atan2(std::sqrt(h2), a);
            angles.push_back(wrap_angle(phi - delta));
            angles.push_back(wrap_angle(phi + delta));

            // Record each pair's crossings once.
            if (j > i) {
                for (double s : {-1.0, 1.0}) {
                    const double th = phi + s * delta;
                    CircleCrossing cc;
                    cc.disc_a = i;
                    cc.disc_b = j;
                    cc.location = {cx + r * std::cos(th), cy + r * std::sin(th)};
                    cc.base_value = field.value_excluding(cc.location, i, j);
                    cc.inside_window =
                        cc.location[0] > xmin && cc.location[0] < xmax &&
                        cc.location[1] > ymin && cc.location[1] < ymax;
                    js.crossings.push_back(cc);
                }
            }
        });

        // Circle/window-boundary crossings (the fill rectangle).
        auto vertical_line = [&](double X, double y_lo, double y_hi) {
            const double dx = X - cx;
            if (std::abs(r - std::abs(dx)) < tolerance)
                throw degenerate_configuration("circle tangent to window boundary");
            if (std::abs(dx) >= r) return;
            const double dy = std::sqrt(r * r - dx * dx);
            for (double s : {-1.0, 1.0}) {
                const double y = cy + s * dy;
                if (std::abs(y - y_lo) < tolerance || std::abs(y - y_hi) < tolerance)
                    throw degenerate_configuration("circle through window corner");
                if (y > y_lo && y < y_hi) angles.push_back(wrap_angle(std::atan2(s * dy, dx)));
            }
        };
        auto horizontal_line = [&](double Y, double x_lo, double x_hi) {
            const double dy = Y - cy;
            if (std::abs(r - std::abs(dy)) < tolerance)
                throw degenerate_configuration("circle tangent to window boundary");
            if (std::abs(dy) >= r) return;
            const double dx = std::sqrt(r * r - dy * dy);
            for (double s : {-1.0, 1.0}) {
                const double x = cx + s * dx;
                if (std::abs(x - x_lo) < tolerance || std::abs(x - x_hi) < tolerance)
                    throw degenerate_configuration("circle through window corner");
                if (x > x_lo && x < x_hi) angles.push_back(wrap_angle(std::atan2(dy, s * dx)));
            }
        };
        vertical_line(xmin, ymin, ymax);
        vertical_line(xmax, ymin, ymax);
        horizontal_line(ymin, xmin, xmax);
        horizontal_line(ymax, xmin, xmax);

        // Split the circle.
        std::sort(angles.begin(), angles.end());
        for (std::size_t k = 1; k < angles.size(); ++k) {
            if (angles[k] - angles[k - 1] < tolerance)
                throw degenerate_configuration("collapsing split points on a circle");
        }
        if (angles.size() >= 2 && kTwoPi - angles.back() + angles.front() < tolerance)
            throw degenerate_configuration("collapsing split points on a circle");

        auto push_arc = [&](double t0, double t1) {
            Arc arc;
            arc.disc = i;
            arc.theta0 = t0;
            arc.theta1 = t1;
            arc.length = r * (t1 - t0);
            const double tm = 0.5 * (t0 + t1);
            arc.midpoint = {cx + r * std::cos(tm), cy + r * std::sin(tm)};
            arc.inside_window =
                arc.midpoint[0] > xmin && arc.midpoint[0] < xmax &&
                arc.midpoint[1] > ymin && arc.midpoint[1] < ymax;
            arc.base_value = field.value_excluding(arc.midpoint, i);
            js.arcs.push_back(arc);
        };

        if (angles.empty()) {
            push_arc(0.0, kTwoPi);
        } else {
            for (std::size_t k = 0; k + 1 < angles.size(); ++k)
                push_arc(angles[k], angles[k + 1]);
            push_arc(angles.back(), angles.front() + kTwoPi);
        }
    }
    return js;
}

}  // namespace sngeo
