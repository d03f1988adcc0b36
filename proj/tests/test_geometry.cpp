#include "doctest.h"
#include "sngeo/geometry.hpp"

using namespace sngeo;

TEST_CASE("cube windows match the half-open integer convention") {
    const LatticeWindow w1 = LatticeWindow::cube(1.0, 2);
    CHECK(w1.cell_count() == 1);
    CHECK(w1.cell(0)[0] == 0);
    CHECK(w1.cell(0)[1] == 0);

    const LatticeWindow w4 = LatticeWindow::cube(4.0, 1);
    REQUIRE(w4.cell_count() == 4);
    CHECK(w4.lo()[0] == -2);
    CHECK(w4.hi()[0] == 1);

    CHECK(LatticeWindow::cube(4.0, 2).cell_count() == 16);
    CHECK(LatticeWindow::cube(10.0, 2).cell_count() == 100);
    CHECK(LatticeWindow::cube(5.0, 1).cell_count() == 5);

    CHECK_THROWS_AS(LatticeWindow::cube(0.5, 2), invalid_parameter);
    CHECK_THROWS_AS(LatticeWindow::cube(4.0, 0), invalid_parameter);
}

TEST_CASE("fill volume equals cell count exactly") {
    for (double a : {1.0, 3.0, 4.0, 7.5}) {
        const LatticeWindow w = LatticeWindow::cube(a, 2);
        CHECK(Region::window_fill(w).volume() == static_cast<double>(w.cell_count()));
    }
    const LatticeWindow u = LatticeWindow::from_cells(2, {0, 0, 0, 1, 5, 5});
    CHECK(u.cell_count() == 3);
    CHECK(Region::window_fill(u).volume() == 3.0);
}

TEST_CASE("fill membership is half-open per cell") {
    const LatticeWindow w = LatticeWindow::cube(2.0, 1);  // cells {-1, 0}
    CHECK(w.fill_contains(std::vector<double>{-1.5}));
    CHECK(w.fill_contains(std::vector<double>{0.49}));
    CHECK_FALSE(w.fill_contains(std::vector<double>{0.5}));
    CHECK_FALSE(w.fill_contains(std::vector<double>{-1.51}));
}

TEST_CASE("lattice boundary") {
    const LatticeWindow w1 = LatticeWindow::cube(1.0, 2);
    CHECK(w1.lattice_boundary().size() == 2);  // the single cell, flat d=2

    const LatticeWindow w4 = LatticeWindow::cube(4.0, 2);
    CHECK(w4.lattice_boundary().size() / 2 == 12);

    const LatticeWindow w1d = LatticeWindow::cube(4.0, 1);
    const auto b = w1d.lattice_boundary();
    REQUIRE(b.size() == 2);
    CHECK(b[0] == -2);
    CHECK(b[1] == 1);
}

TEST_CASE("boundary fraction decreases along the cube family") {
    double prev = 1.0;
    for (double a : {4.0, 8.0, 16.0, 32.0}) {
        const LatticeWindow w = LatticeWindow::cube(a, 2);
        const double frac = (w.lattice_boundary().size() / 2.0) / w.cell_count();
        CHECK(frac < prev);
        prev = frac;
    }
    CHECK(prev < 0.13);
}

TEST_CASE("region membership and volumes") {
    const Region box = Region::centered_cube(2.0, 2);
    CHECK(box.volume() == 4.0);
    CHECK(box.contains(std::vector<double>{0.0, 0.0}));
    CHECK(box.contains(std::vector<double>{-1.0, -1.0}));
    CHECK_FALSE(box.contains(std::vector<double>{1.0, 0.0}));

    const Region ball = Region::ball({0.0, 0.0}, 2.0);
    CHECK(ball.volume() == doctest::Approx(4.0 * 3.14159265358979).epsilon(1e-12));
    CHECK(ball.contains(std::vector<double>{2.0, 0.0}));  // closed
    CHECK_FALSE(ball.contains(std::vector<double>{2.0, 0.1}));

    const Region ann = Region::box_annulus(1.0, 3.0, 2);
    CHECK(ann.volume() == doctest::Approx(8.0));
    CHECK(ann.contains(std::vector<double>{1.0, 1.0}));
    CHECK_FALSE(ann.contains(std::vector<double>{0.0, 0.0}));

    CHECK_THROWS_AS(Region::ball_complement({0.0, 0.0}, 1.0).volume(), invalid_parameter);
}
