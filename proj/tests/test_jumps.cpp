#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sngeo/jumps.hpp"

using namespace sngeo;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

MarkedConfiguration discs(std::vector<double> xy, std::vector<Mark> marks) {
    return MarkedConfiguration(2, std::move(xy), std::move(marks), MarkKind::disc_grain);
}

double circle_arc_sum(const JumpStructure& js, std::int64_t disc) {
    double s = 0.0;
    for (const Arc& a : js.arcs)
        if (a.disc == disc) s += a.length;
    return s;
}

}  // namespace

TEST_CASE("single disc inside the window is one full arc") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    const auto cfg = discs({0.0, 0.0}, {Mark{1.0, 1.0}});
    const JumpStructure js = build_jump_structure(cfg, w);
    REQUIRE(js.arcs.size() == 1);
    CHECK(js.arcs[0].length == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(js.arcs[0].base_value == 0.0);
    CHECK(js.arcs[0].inside_window);
    CHECK(js.crossings.empty());
}

TEST_CASE("two overlapping discs split into two arcs each") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    const auto cfg = discs({-0.5, 0.0, 0.5, 0.0}, {Mark{1.0, 1.0}, Mark{1.0, 1.0}});
    const JumpStructure js = build_jump_structure(cfg, w);
    REQUIRE(js.arcs.size() == 4);
    CHECK(js.crossings.size() == 2);
    for (std::int64_t d : {0, 1})
        CHECK(circle_arc_sum(js, d) == doctest::Approx(kTwoPi * 1.0).epsilon(1e-9));
    // Base values: the lens arc of each circle sits inside the other disc.
    int lens_arcs = 0;
    for (const Arc& a : js.arcs) {
        if (a.base_value == 1.0) ++lens_arcs;
        else CHECK(a.base_value == 0.0);
    }
    CHECK(lens_arcs == 2);
}

TEST_CASE("tangent and coincident circles are rejected") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    CHECK_THROWS_AS(build_jump_structure(
                        discs({0.0, 0.0, 2.0, 0.0}, {Mark{1.0, 1.0}, Mark{1.0, 1.0}}), w),
                    degenerate_configuration);
    CHECK_THROWS_AS(build_jump_structure(
                        discs({0.0, 0.0, 1e-12, 0.0}, {Mark{1.0, 1.0}, Mark{1.0, 1.0}}), w),
                    degenerate_configuration);
    // Circle tangent to the window boundary line x = 3.5 (fill of Q8).
    CHECK_THROWS_AS(build_jump_structure(discs({2.5, 0.0}, {Mark{1.0, 1.0}}), w),
                    degenerate_configuration);
}

TEST_CASE("arcs partition every circle on random configurations") {
    const LatticeWindow w = LatticeWindow::cube(6.0, 2);
    const MarkDistribution marks = MarkDistribution::disc_grain({1.0, -1.0}, {0.7, 0.3}, 0.35, 0.9);
    int built = 0;
    for (std::uint64_t rep = 0; built < 100; ++rep) {
        REQUIRE(rep < 300);
        // Centers may stick out of the window here: boundary clipping paths
        // are exercised on purpose.
        MarkedConfiguration cfg;
        try {
            cfg = sample_poisson(Region::padded_fill(w, 0.9), marks, SeedStream{404, rep});
            if (cfg.empty()) continue;
            const JumpStructure js = build_jump_structure(cfg, w);
            for (std::int64_t d = 0; d < cfg.size(); ++d) {
                const double expect = kTwoPi * cfg.mark(d).radius;
                CHECK(circle_arc_sum(js, d) == doctest::Approx(expect).epsilon(1e-9));
            }
            ++built;
        } catch (const degenerate_configuration&) {
            continue;
        }
    }
}

TEST_CASE("field jumps by the amplitude across every arc") {
    const LatticeWindow w = LatticeWindow::cube(6.0, 2);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto cfg = oracles::generic_token_config(w, 505, rep, 1e-4);
        const JumpStructure js = build_jump_structure(cfg, w);
        const FieldEvaluator ev(cfg, TokenKernel{});
        for (const Arc& a : js.arcs) {
            if (!a.inside_window) continue;
            // Midpoint offset along the outward normal.
            const double cx = cfg.point(a.disc)[0];
            const double cy = cfg.point(a.disc)[1];
            const double r = cfg.mark(a.disc).radius;
            const double nx = (a.midpoint[0] - cx) / r;
            const double ny = (a.midpoint[1] - cy) / r;
            // Skip arcs with another circle within 1e-5 of the midpoint.
            bool clear = true;
            for (std::int64_t d = 0; d < cfg.size() && clear; ++d) {
                if (d == a.disc) continue;
                const double dist = std::hypot(a.midpoint[0] - cfg.point(d)[0],
                                               a.midpoint[1] - cfg.point(d)[1]);
                if (std::abs(dist - cfg.mark(d).radius) < 1e-5) clear = false;
            }
            if (!clear) continue;
            const std::vector<double> inside{a.midpoint[0] - 1e-6 * nx,
                                             a.midpoint[1] - 1e-6 * ny};
            const std::vector<double> outside{a.midpoint[0] + 1e-6 * nx,
                                              a.midpoint[1] + 1e-6 * ny};
            const double L = cfg.mark(a.disc).amplitude;
            const double jump = ev.value(inside) - ev.value(outside);
            CHECK(jump == doctest::Approx(L).epsilon(1e-6));
            // f^- recorded on the arc matches the outside value.
            CHECK(ev.value(outside) == a.base_value);
        }
    }
}
