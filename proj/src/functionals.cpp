#include "sngeo/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace sngeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLNode[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLWeight[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

}  // namespace

void FunctionalSpec::validate() const {
    if (!std::isfinite(level)) throw invalid_parameter("FunctionalSpec: level must be finite");
    if (k < 1) throw invalid_parameter("FunctionalSpec: k must be >= 1");
    const double inv = 1.0 / grid_spacing;
    const double r = std::round(std::log2(inv));
    if (!(grid_spacing > 0.0) || std::abs(inv - std::exp2(r)) > 1e-9 || r < 3.0)
        throw invalid_parameter("FunctionalSpec: grid spacing must be 2^-m with m >= 3");
    if (quad_order < 8) throw invalid_parameter("FunctionalSpec: quad order must be >= 8");
    if (!(test_width > 0.0)) throw invalid_parameter("FunctionalSpec: test width must be > 0");
}

double excursion_volume(const FieldGrid& grid, double u) {
    std::int64_t count = 0;
    for (double v : grid.values())
        if (v >= u) ++count;
    double cell = 1.0;
    for (int i = 0; i < grid.dim(); ++i) cell *= grid.spacing();
    return cell * static_cast<double>(count);
}

namespace {

// Marching squares support. Edges are keyed by their lower-left node and
// orientation, which makes segment endpoints match exactly across cells.
struct MsKey {
    std::int64_t node;  // ix * ny + iy
    int orient;         // 0: along x (to ix+1), 1: along y (to iy+1)
    bool operator<(const MsKey& o) const {
        return node != o.node ? node < o.node : orient < o.orient;
    }
    bool operator==(const MsKey& o) const { return node == o.node && orient == o.orient; }
};

struct MsVertex {
    double x, y;
};

struct Contour {
    std::vector<MsVertex> pts;
    bool closed = false;
};

double polyline_length(const std::vector<MsVertex>& p, bool closed) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i)
        len += std::hypot(p[i].x - p[i - 1].x, p[i].y - p[i - 1].y);
    if (closed && p.size() > 2)
        len += std::hypot(p.front().x - p.back().x, p.front().y - p.back().y);
    return len;
}

// Sliding-window vertex average for closed contours. The raw marching-squares
// polygon carries an orientation-dependent staircase inflation of up to ~5.5%
// on jump fields; averaging over a window of a few cell widths removes it
// while the curvature shortening stays far below the measurement tolerances.
double smoothed_closed_length(const std::vector<MsVertex>& p, int half_window) {
    const std::size_t n = p.size();
    if (n < 2 * static_cast<std::size_t>(half_window) + 3 || n < 8)
        return polyline_length(p, true);
    std::vector<MsVertex> q(n);
    const int w = half_window;
    for (std::size_t i = 0; i < n; ++i) {
        double sx = 0.0, sy = 0.0;
        for (int k = -w; k <= w; ++k) {
            const std::size_t j =
                (i + n + static_cast<std::size_t>(static_cast<int>(n) + k)) % n;
            sx += p[j].x;
            sy += p[j].y;
        }
        q[i] = {sx / (2 * w + 1), sy / (2 * w + 1)};
    }
    return polyline_length(q, true);
}

}  // namespace

double fixed_level_perimeter_grid(const FieldGrid& grid, double u) {
    if (grid.dim() != 2)
        throw invalid_parameter("fixed_level_perimeter_grid: d = 2 required");
    const std::int64_t nx = grid.extents()[0];
    const std::int64_t ny = grid.extents()[1];
    if (nx < 2 || ny < 2) return 0.0;
    auto val = [&](std::int64_t ix, std::int64_t iy) {
        return grid.values()[ix * ny + iy];
    };
    auto xc = [&](std::int64_t ix) { return grid.node_coord(0, ix); };
    auto yc = [&](std::int64_t iy) { return grid.node_coord(1, iy); };

    // Crossing position on an edge, and segment soup keyed by edges.
    std::map<MsKey, MsVertex> edge_vertex;
    std::vector<std::pair<MsKey, MsKey>> segments;
    auto edge_point = [&](std::int64_t ix, std::int64_t iy, int orient) -> MsKey {
        MsKey key{ix * ny + iy, orient};
        if (edge_vertex.find(key) == edge_vertex.end()) {
            const double v0 = val(ix, iy);
            const double v1 = orient == 0 ? val(ix + 1, iy) : val(ix, iy + 1);
            const double t = (u - v0) / (v1 - v0);
            MsVertex mv;
            if (orient == 0)
                mv = {xc(ix) + t * (xc(ix + 1) - xc(ix)), yc(iy)};
            else
                mv = {xc(ix), yc(iy) + t * (yc(iy + 1) - yc(iy))};
            edge_vertex[key] = mv;
        }
        return key;
    };

    for (std::int64_t ix = 0; ix + 1 < nx; ++ix) {
        for (std::int64_t iy = 0; iy + 1 < ny; ++iy) {
            const bool b00 = val(ix, iy) >= u;
            const bool b10 = val(ix + 1, iy) >= u;
            const bool b01 = val(ix, iy + 1) >= u;
            const bool b11 = val(ix + 1, iy + 1) >= u;
            const int code = (b00 ? 1 : 0) | (b10 ? 2 : 0) | (b01 ? 4 : 0) | (b11 ? 8 : 0);
            if (code == 0 || code == 15) continue;

            const MsKey bottom = edge_point(ix, iy, 0);        // (ix,iy)-(ix+1,iy)
            const MsKey left = edge_point(ix, iy, 1);          // (ix,iy)-(ix,iy+1)
            const MsKey right = edge_point(ix + 1, iy, 1);     // (ix+1,iy)-(ix+1,iy+1)
            const MsKey top = edge_point(ix, iy + 1, 0);       // (ix,iy+1)-(ix+1,iy+1)

            switch (code) {
                case 1: case 14: segments.emplace_back(bottom, left); break;
                case 2: case 13: segments.emplace_back(bottom, right); break;
                case 4: case 11: segments.emplace_back(left, top); break;
                case 8: case 7: segments.emplace_back(right, top); break;
                case 3: case 12: segments.emplace_back(left, right); break;
                case 5: case 10: segments.emplace_back(bottom, top); break;
                case 6: case 9: {
                    // Saddle: the cell-center average decides whether the two
                    // inside corners connect diagonally.
                    const double c =
                        0.25 * (val(ix, iy) + val(ix + 1, iy) + val(ix, iy + 1) +
                                val(ix + 1, iy + 1));
                    const bool center_in = c >= u;
                    if (code == 6) {  // inside: bottom-right and top-left
                        if (center_in) {
                            segments.emplace_back(bottom, left);
                            segments.emplace_back(right, top);
                        } else {
                            segments.emplace_back(bottom, right);
                            segments.emplace_back(left, top);
                        }
                    } else {  // inside: bottom-left and top-right
                        if (center_in) {
                            segments.emplace_back(bottom, right);
                            segments.emplace_back(left, top);
                        } else {
                            segments.emplace_back(bottom, left);
                            segments.emplace_back(right, top);
                        }
                    }
                    break;
                }
                default: break;
            }
        }
    }
    if (segments.empty()) return 0.0;

    // Chain segments into contours (every edge key has degree <= 2).
    std::map<MsKey, std::vector<std::size_t>> incident;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        incident[segments[s].first].push_back(s);
        incident[segments[s].second].push_back(s);
    }
    std::vector<bool> used(segments.size(), false);
    std::vector<Contour> contours;

    auto walk = [&](std::size_t seg0, MsKey start) {
        Contour c;
        c.pts.push_back(edge_vertex[start]);
        MsKey cur = start;
        std::size_t seg = seg0;
        for (;;) {
            used[seg] = true;
            const MsKey next =
                segments[seg].first == cur ? segments[seg].second : segments[seg].first;
            c.pts.push_back(edge_vertex[next]);
            cur = next;
            const auto& inc = incident.find(cur)->second;
            std::size_t follow = segments.size();
            for (std::size_t cand : inc)
                if (!used[cand]) follow = cand;
            if (follow == segments.size()) break;
            seg = follow;
        }
        c.closed = (cur == start);
        if (c.closed) c.pts.pop_back();
        return c;
    };

    // Open chains first (window-boundary crossings), then closed loops.
    for (const auto& [key, inc] : incident) {
        if (inc.size() == 1 && !used[inc.front()])
            contours.push_back(walk(inc.front(), key));
    }
    for (const auto& [key, inc] : incident) {
        for (std::size_t s : inc)
            if (!used[s]) contours.push_back(walk(s, key));
    }

    const int half_window =
        std::clamp(static_cast<int>(std::round(0.04 / grid.spacing())), 1, 25);
    double total = 0.0;
    for (const auto& c : contours) {
        if (c.closed)
            total += smoothed_closed_length(c.pts, half_window);
        else
            total += polyline_length(c.pts, false);
    }
    return total;
}

namespace {

// Excursion boundary test for one arc: with own-disc contribution excluded
// equal to b and amplitude L, the indicator flips across the circle exactly
// when b lies in [u-L, u) for L > 0, or [u, u-L) for L < 0.
bool arc_is_boundary(double base, double L, double u) {
    if (L > 0.0) return base >= u - L && base < u;
    return base >= u && base < u - L;
}

}  // namespace

double fixed_level_perimeter_token(const JumpStructure& js, double u) {
    double total = 0.0;
    for (const Arc& a : js.arcs) {
        if (!a.inside_window) continue;
        if (arc_is_boundary(a.base_value, js.config.mark(a.disc).amplitude, u))
            total += a.length;
    }
    return total;
}

CurvatureDecomposition total_curvature(const JumpStructure& js, double u) {
    CurvatureDecomposition out;
    double arc_sum = 0.0;
    for (const Arc& a : js.arcs) {
        const double L = js.config.mark(a.disc).amplitude;
        if (!arc_is_boundary(a.base_value, L, u)) continue;
        CurvatureArc ca;
        ca.disc = a.disc;
        ca.theta0 = a.theta0;
        ca.theta1 = a.theta1;
        const double r = js.config.mark(a.disc).radius;
        ca.curvature = (L > 0.0 ? 1.0 : -1.0) / r;
        ca.length = a.inside_window ? a.length : 0.0;
        out.arcs.push_back(ca);
        arc_sum += ca.curvature * ca.length;
    }

    double corner_sum = 0.0;
    for (const CircleCrossing& cc : js.crossings) {
        if (!cc.inside_window) continue;
        const double La = js.config.mark(cc.disc_a).amplitude;
        const double Lb = js.config.mark(cc.disc_b).amplitude;
        const double q00 = cc.base_value;
        const bool m00 = q00 >= u;
        const bool m10 = q00 + La >= u;
        const bool m01 = q00 + Lb >= u;
        const bool m11 = q00 + La + Lb >= u;
        const int count = int(m00) + int(m10) + int(m01) + int(m11);
        if (count != 1 && count != 3) continue;  // no corner: smooth or empty

        // One boundary germ per circle. For circle a the germ lies on the
        // half where crossing a flips membership; the analogous test with the
        // roles swapped gives circle b.
        struct Germ {
            std::array<double, 2> tangent{};  // oriented (excursion left)
            bool outgoing = false;
        };
        auto make_germ = [&](std::int64_t self, std::int64_t other, bool flip_inside_other) {
            const double sx = js.config.point(self)[0];
            const double sy = js.config.point(self)[1];
            const double L_self = js.config.mark(self).amplitude;
            // CCW tangent at the crossing, oriented by the amplitude sign.
            const double tx0 = -(cc.location[1] - sy);
            const double ty0 = cc.location[0] - sx;
            const double norm = std::hypot(tx0, ty0);
            double tx = tx0 / norm, ty = ty0 / norm;
            if (L_self < 0.0) {
                tx = -tx;
                ty = -ty;
            }
            // Germ direction: the tangent sign that walks into the half of
            // this circle lying inside (or outside) the other disc.
            const double ox = cc.location[0] - js.config.point(other)[0];
            const double oy = cc.location[1] - js.config.point(other)[1];
            const double into_other = -(tx * ox + ty * oy);  // >0: +tangent enters other disc
            const bool plus_enters = into_other > 0.0;
            const bool germ_along_plus = (flip_inside_other == plus_enters);
            Germ g;
            g.tangent = {tx, ty};
            g.outgoing = germ_along_plus;  // oriented tangent points away from the corner
            return g;
        };

        const bool a_flips_inside_b = m01 != m11;
        const bool b_flips_inside_a = m10 != m11;
        Germ ga = make_germ(cc.disc_a, cc.disc_b, a_flips_inside_b);
        Germ gb = make_germ(cc.disc_b, cc.disc_a, b_flips_inside_a);
        if (ga.outgoing == gb.outgoing)
            throw degenerate_configuration("total_curvature: inconsistent corner orientation");
        const Germ& in = ga.outgoing ? gb : ga;
        const Germ& outg = ga.outgoing ? ga : gb;
        const double cross = in.tangent[0] * outg.tangent[1] - in.tangent[1] * outg.tangent[0];
        const double dot = in.tangent[0] * outg.tangent[0] + in.tangent[1] * outg.tangent[1];
        const double angle = std::atan2(cross, dot);
        out.corners.push_back(CurvatureCorner{cc.location, angle});
        corner_sum += angle;
    }
    out.total = arc_sum + corner_sum;
    return out;
}

TestFunction TestFunction::bump(double center, double width) {
    if (!(width > 0.0)) throw invalid_parameter("TestFunction::bump: width must be > 0");
    TestFunction f;
    f.center_ = center;
    f.width_ = width;
    f.panels_ = 256;
    f.cum_.assign(f.panels_ + 1, 0.0);
    const double lo = f.support_lo();
    const double panel = 2.0 * width / f.panels_;
    double acc = 0.0;
    for (int p = 0; p < f.panels_; ++p) {
        const double a = lo + p * panel;
        double s = 0.0;
        for (int k = 0; k < kGL; ++k)
            s += kGLWeight[k] * f.raw(a + 0.5 * panel * (1.0 + kGLNode[k]));
        acc += 0.5 * panel * s;
        f.cum_[p + 1] = acc;
    }
    return f;
}

double TestFunction::raw(double t) const {
    const double s = (t - center_) / width_;
    const double d = s * s - 1.0;
    if (d >= 0.0) return 0.0;
    return std::exp(1.0 / d);
}

double TestFunction::value(double t) const { return raw(t); }

double TestFunction::primitive(double t) const {
    if (t <= support_lo()) return 0.0;
    if (t >= support_hi()) return cum_.back();
    const double panel = 2.0 * width_ / panels_;
    const double offset = (t - support_lo()) / panel;
    int p = static_cast<int>(offset);
    if (p >= panels_) p = panels_ - 1;
    const double a = support_lo() + p * panel;
    double s = 0.0;
    const double half = 0.5 * (t - a);
    for (int k = 0; k < kGL; ++k)
        s += kGLWeight[k] * raw(a + half * (1.0 + kGLNode[k]));
    return cum_[p] + half * s;
}

double weighted_perimeter_cont(const MarkedConfiguration& config, const RadialKernel& kernel,
                               const LatticeWindow& window, const TestFunction& h,
                               double grid_spacing) {
    FieldGrid grid = build_grid(config, kernel, window, grid_spacing, /*with_gradients=*/true);
    const int d = grid.dim();
    const std::int64_t n = grid.node_count();
    std::vector<double> integrand(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double hv = h.value(grid.values()[i]);
        if (hv == 0.0) {
            integrand[i] = 0.0;
            continue;
        }
        double g2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double g = grid.gradients()[i * d + k];
            g2 += g * g;
        }
        integrand[i] = hv * std::sqrt(g2);
    }
    double cell = 1.0;
    for (int k = 0; k < d; ++k) cell *= grid_spacing;
    return cell * pairwise_sum(integrand);
}

double weighted_perimeter_jump(const JumpStructure& js, const TestFunction& h, int quad_order) {
    if (quad_order < 8)
        throw invalid_parameter("weighted_perimeter_jump: quadrature order must be >= 8");
    if (js.config.empty()) return 0.0;
    FieldEvaluator field(js.config, TokenKernel{});
    // Composite Gauss-Legendre along each arc with ceil(q/16) panels of the
    // 16-point rule (q nodes requested in total).
    const int panels = (quad_order + kGL - 1) / kGL;
    double total = 0.0;
    for (const Arc& a : js.arcs) {
        if (!a.inside_window) continue;
        const double L = js.config.mark(a.disc).amplitude;
        const double r = js.config.mark(a.disc).radius;
        const double cx = js.config.point(a.disc)[0];
        const double cy = js.config.point(a.disc)[1];
        const double span = (a.theta1 - a.theta0) / panels;
        double arc_integral = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double t0 = a.theta0 + p * span;
            double s = 0.0;
            for (int k = 0; k < kGL; ++k) {
                const double th = t0 + 0.5 * span * (1.0 + kGLNode[k]);
                const std::array<double, 2> pos{cx + r * std::cos(th), cy + r * std::sin(th)};
                const double base = field.value_excluding(pos, a.disc);
                const double f_lo = std::min(base, base + L);
                const double f_hi = std::max(base, base + L);
                s += kGLWeight[k] * (h.primitive(f_hi) - h.primitive(f_lo));
            }
            arc_integral += 0.5 * span * r * s;
        }
        total += arc_integral;
    }
    return total;
}

double score_sum(const MarkedConfiguration& config, const LatticeWindow& window,
                 const std::function<double(const Mark&, const MarkedConfiguration&)>& score) {
    double total = 0.0;
    for (std::int64_t i = 0; i < config.size(); ++i) {
        auto p = config.point(i);
        if (!window.fill_contains(p)) continue;
        total += score(config.mark(i), config.translated(p));
    }
    return total;
}

}  // namespace sngeo
