#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sngeo/functionals.hpp"
#include "sngeo/nn.hpp"

using namespace sngeo;

namespace {

constexpr double kPi = std::numbers::pi;

MarkedConfiguration discs(std::vector<double> xy, std::vector<Mark> marks) {
    return MarkedConfiguration(2, std::move(xy), std::move(marks), MarkKind::disc_grain);
}

}  // namespace

TEST_CASE("excursion volume by node counting") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    FieldGrid zero = FieldGrid::allocate(w, 0.125, false);
    CHECK(excursion_volume(zero, 0.5) == 0.0);
    CHECK(excursion_volume(zero, -1.0) == 64.0);  // u below the minimum: |W| exactly

    const auto cfg = discs({0.0, 0.0}, {Mark{1.0, 1.0}});
    const FieldGrid g = build_grid(cfg, TokenKernel{}, w, 1.0 / 128.0);
    CHECK(excursion_volume(g, 0.5) == doctest::Approx(kPi).epsilon(0.01));

    // Monotone non-increasing in u.
    double prev = excursion_volume(g, -0.5);
    for (double u : {0.2, 0.7, 1.2}) {
        const double v = excursion_volume(g, u);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("grid perimeter: constant, disc, half-plane") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    FieldGrid flat = FieldGrid::allocate(w, 0.125, false);
    CHECK(fixed_level_perimeter_grid(flat, 0.5) == 0.0);

    const auto cfg = discs({-0.5, -0.5}, {Mark{1.0, 1.0}});
    const FieldGrid g = build_grid(cfg, TokenKernel{}, w, 1.0 / 128.0);
    CHECK(fixed_level_perimeter_grid(g, 0.5) == doctest::Approx(2.0 * kPi).epsilon(0.02));

    // Synthetic half-plane indicator f = 1_{x >= 0} on a 4x4 window.
    const LatticeWindow w4 = LatticeWindow::cube(4.0, 2);
    FieldGrid half = FieldGrid::allocate(w4, 1.0 / 64.0, false);
    std::vector<double> y;
    for (std::int64_t i = 0; i < half.node_count(); ++i) {
        half.node_coords(i, y);
        half.values_mut()[i] = y[0] >= 0.0 ? 1.0 : 0.0;
    }
    CHECK(fixed_level_perimeter_grid(half, 0.5) == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("token perimeter of a single disc") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    const auto cfg = discs({0.0, 0.0}, {Mark{1.0, 1.0}});
    const JumpStructure js = build_jump_structure(cfg, w);
    CHECK(fixed_level_perimeter_token(js, 0.5) == doctest::Approx(2.0 * kPi).epsilon(1e-9));
    CHECK(fixed_level_perimeter_token(js, 1.5) == 0.0);
}

TEST_CASE("perimeter routes agree on random token configurations") {
    const LatticeWindow w = LatticeWindow::cube(6.0, 2);
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto cfg = oracles::generic_token_config(w, 606, rep, 0.012);
        const JumpStructure js = build_jump_structure(cfg, w);
        const double exact = fixed_level_perimeter_token(js, 0.5);
        if (exact < 1.0) continue;
        const FieldGrid g = build_grid(cfg, TokenKernel{}, w, 1.0 / 256.0);
        const double approx = fixed_level_perimeter_grid(g, 0.5);
        CHECK(std::abs(approx - exact) / std::max(exact, 1.0) < 0.02);
    }
}

TEST_CASE("total curvature equals 2 pi chi on reference arrangements") {
    const LatticeWindow w = LatticeWindow::cube(10.0, 2);

    // Single disc.
    {
        const JumpStructure js = build_jump_structure(discs({0.0, 0.0}, {Mark{1.0, 1.0}}), w);
        const CurvatureDecomposition tc = total_curvature(js, 0.5);
        CHECK(tc.total == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        CHECK(tc.corners.empty());
    }
    // Three pairwise-disjoint discs: chi = 3.
    {
        const JumpStructure js = build_jump_structure(
            discs({-3.0, 0.0, 0.0, 3.0, 3.0, 0.0},
                  {Mark{1.0, 0.8}, Mark{1.0, 0.7}, Mark{1.0, 0.9}}),
            w);
        CHECK(total_curvature(js, 0.5).total == doctest::Approx(6.0 * kPi).epsilon(1e-12));
    }
    // Two overlapping discs: union chi = 1, lens chi = 1.
    {
        const JumpStructure js = build_jump_structure(
            discs({-0.5, 0.0, 0.5, 0.0}, {Mark{1.0, 1.0}, Mark{1.0, 1.0}}), w);
        const CurvatureDecomposition uni = total_curvature(js, 0.5);
        CHECK(uni.total == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        REQUIRE(uni.corners.size() == 2);
        CHECK(uni.corners[0].angle == doctest::Approx(-kPi / 3.0).epsilon(1e-12));
        const CurvatureDecomposition lens = total_curvature(js, 1.5);
        CHECK(lens.total == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        REQUIRE(lens.corners.size() == 2);
        CHECK(lens.corners[0].angle == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    }
    // Annulus from a negative disc inside a positive one: chi = 0.
    {
        const JumpStructure js = build_jump_structure(
            discs({0.0, 0.0, 0.05, 0.0}, {Mark{1.0, 1.0}, Mark{-1.0, 0.4}}), w);
        CHECK(total_curvature(js, 0.5).total == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("total curvature matches the grid Euler characteristic oracle") {
    const LatticeWindow w = LatticeWindow::cube(6.0, 2);
    int checked = 0;
    for (std::uint64_t rep = 0; rep < 12; ++rep) {
        const auto cfg = oracles::generic_token_config(w, 707, rep, 0.012);
        const JumpStructure js = build_jump_structure(cfg, w);
        const CurvatureDecomposition tc = total_curvature(js, 0.5);
        const double chi_tc = tc.total / (2.0 * kPi);
        CHECK(std::abs(chi_tc - std::round(chi_tc)) < 1e-7);
        const FieldGrid g = build_grid(cfg, TokenKernel{}, w, 1.0 / 256.0);
        const long chi_grid = oracles::grid_euler_characteristic(g, 0.5);
        CHECK(std::lround(chi_tc) == chi_grid);
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("bump test function and its primitive") {
    const TestFunction h = TestFunction::bump(1.0, 0.5);
    CHECK(h.value(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(h.value(0.5) == 0.0);
    CHECK(h.value(1.6) == 0.0);
    CHECK(h.primitive(0.4) == 0.0);
    CHECK(h.primitive(2.0) == h.primitive(1.5));

    // H' = h by five-point finite differences at 100 points.
    auto probe = make_engine(SeedStream{17, 0});
    for (int i = 0; i < 100; ++i) {
        const double t = uniform_in(probe, 0.4, 1.6);
        const double e = 1e-3;
        const double d = (-h.primitive(t + 2 * e) + 8 * h.primitive(t + e) -
                          8 * h.primitive(t - e) + h.primitive(t - 2 * e)) /
                         (12 * e);
        CHECK(d == doctest::Approx(h.value(t)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("weighted perimeter, continuous part") {
    const LatticeWindow w = LatticeWindow::cube(4.0, 2);
    const RadialKernel k = RadialKernel::stretched_exp(1.5, 1.0, 1.5, std::exp(-1.0), 2);
    const TestFunction miss = TestFunction::bump(2.5, 0.5);  // support (2, 3)

    const MarkedConfiguration empty(2, {}, {}, MarkKind::radial_kernel_tag);
    CHECK(weighted_perimeter_cont(empty, k, w, TestFunction::bump(1.0, 0.5), 0.125) == 0.0);

    // A single far atom keeps the field below 2 everywhere in the window.
    const MarkedConfiguration far(2, {30.0, 30.0}, {Mark{1.0, 0.0}},
                                  MarkKind::radial_kernel_tag);
    CHECK(weighted_perimeter_cont(far, k, w, miss, 0.125) == 0.0);

    // Richardson consistency: halving the spacing moves the value by < 1%.
    const TestFunction h = TestFunction::bump(0.8, 0.6);
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto cfg = sample_poisson(Region::padded_fill(w, k.trunc_radius()),
                                        MarkDistribution::radial_kernel_tag(),
                                        SeedStream{808, rep});
        const double a = weighted_perimeter_cont(cfg, k, w, h, 1.0 / 8.0);
        const double b = weighted_perimeter_cont(cfg, k, w, h, 1.0 / 16.0);
        if (b > 1e-6) CHECK(std::abs(a - b) / b < 0.01);
    }
}

TEST_CASE("weighted perimeter, jump part") {
    const LatticeWindow w = LatticeWindow::cube(8.0, 2);
    const TestFunction h = TestFunction::bump(0.5, 0.4);

    const MarkedConfiguration empty(2, {}, {}, MarkKind::disc_grain);
    CHECK(weighted_perimeter_jump(build_jump_structure(empty, w), h) == 0.0);

    // Single disc: constant integrand H(L) - H(0) along the circle.
    const auto one = discs({0.0, 0.0}, {Mark{1.0, 1.0}});
    const double expect = 2.0 * kPi * (h.primitive(1.0) - h.primitive(0.0));
    CHECK(weighted_perimeter_jump(build_jump_structure(one, w), h) ==
          doctest::Approx(expect).epsilon(1e-12));

    CHECK_THROWS_AS(weighted_perimeter_jump(build_jump_structure(one, w), h, 4),
                    invalid_parameter);

    // Quadrature refinement changes results by <ated 1e-6 relative.
    const LatticeWindow w6 = LatticeWindow::cube(6.0, 2);
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto cfg = oracles::generic_token_config(w6, 909, rep, 1e-5);
        const JumpStructure js = build_jump_structure(cfg, w6);
        const double a = weighted_perimeter_jump(js, h, 16);
        const double b = weighted_perimeter_jump(js, h, 32);
        if (std::abs(b) > 1e-9) CHECK(std::abs(a - b) / std::abs(b) < 1e-6);
    }
}

TEST_CASE("score sum specializations") {
    const LatticeWindow w = LatticeWindow::cube(4.0, 2);
    const auto cfg = sample_poisson(Region::padded_fill(w, 1.0), MarkDistribution::unit(),
                                    SeedStream{55, 0});
    const double count = score_sum(
        cfg, w, [](const Mark&, const MarkedConfiguration&) { return 1.0; });
    double manual = 0.0;
    for (std::int64_t i = 0; i < cfg.size(); ++i)
        if (w.fill_contains(cfg.point(i))) manual += 1.0;
    CHECK(count == manual);
    CHECK(score_sum(cfg, w, [](const Mark&, const MarkedConfiguration&) { return 0.0; }) ==
          0.0);
}

TEST_CASE("lattice translation covariance") {
    const LatticeWindow w = LatticeWindow::cube(4.0, 2);
    const LatticeWindow wshift = LatticeWindow::from_cells(2, [] {
        std::vector<int> cells;
        const LatticeWindow base = LatticeWindow::cube(4.0, 2);
        for (std::int64_t c = 0; c < base.cell_count(); ++c) {
            cells.push_back(base.cell(c)[0] + 3);
            cells.push_back(base.cell(c)[1] - 2);
        }
        return cells;
    }());

    const auto cfg = oracles::generic_token_config(w, 111, 0, 0.012);
    std::vector<double> flat(cfg.coords_flat().begin(), cfg.coords_flat().end());
    std::vector<Mark> marks;
    for (std::int64_t i = 0; i < cfg.size(); ++i) marks.push_back(cfg.mark(i));
    for (std::int64_t i = 0; i < cfg.size(); ++i) {
        flat[2 * i] += 3.0;
        flat[2 * i + 1] -= 2.0;
    }
    const MarkedConfiguration shifted(2, flat, marks, MarkKind::disc_grain);

    const double p0 = fixed_level_perimeter_token(build_jump_structure(cfg, w), 0.5);
    const double p1 = fixed_level_perimeter_token(build_jump_structure(shifted, wshift), 0.5);
    CHECK(p1 == doctest::Approx(p0).epsilon(1e-9));

    const double t0 = total_curvature(build_jump_structure(cfg, w), 0.5).total;
    const double t1 = total_curvature(build_jump_structure(shifted, wshift), 0.5).total;
    CHECK(t1 == doctest::Approx(t0).epsilon(1e-9));

    const double v0 = excursion_volume(build_grid(cfg, TokenKernel{}, w, 0.125), 0.5);
    // Shifted window is a box with the same cell layout; grids align.
    const double v1 =
        excursion_volume(build_grid(shifted, TokenKernel{}, wshift, 0.125), 0.5);
    CHECK(v1 == doctest::Approx(v0).epsilon(1e-9));
}
