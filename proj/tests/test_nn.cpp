#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sngeo/functionals.hpp"
#include "sngeo/nn.hpp"

using namespace sngeo;

namespace {

MarkedConfiguration points(int dim, std::vector<double> flat) {
    std::vector<Mark> marks(flat.size() / dim, Mark{1.0, 0.0});
    return MarkedConfiguration(dim, std::move(flat), std::move(marks), MarkKind::unit);
}

}  // namespace

TEST_CASE("two points are mutual nearest neighbours") {
    const auto cfg = points(2, {0.0, 0.0, 2.0, 0.0});
    const NeighborStructure ns = nn_structure(cfg, 1);
    CHECK(ns.nn[0] == std::vector<std::int32_t>{1});
    CHECK(ns.nn[1] == std::vector<std::int32_t>{0});
    CHECK(ns.symmetric[0] == std::vector<std::int32_t>{1});
    CHECK(ns.symmetric[1] == std::vector<std::int32_t>{0});
    CHECK(nn_length_of(cfg, 1) == 2.0);
}

TEST_CASE("collinear triple in one dimension") {
    const auto cfg = points(1, {0.0, 1.0, 3.0});  // sorted: indices 0,1,2
    const NeighborStructure ns = nn_structure(cfg, 1);
    CHECK(ns.nn[0] == std::vector<std::int32_t>{1});  // NN(0) = 1
    CHECK(ns.nn[1] == std::vector<std::int32_t>{0});  // NN(1) = 0 (distance 1 beats 2)
    CHECK(ns.nn[2] == std::vector<std::int32_t>{1});  // NN(3) = 1
    CHECK(ns.symmetric[1] == std::vector<std::int32_t>{0, 2});  // N_1(1) = {0, 3}
}

TEST_CASE("exact distance ties break lexicographically") {
    const auto cfg = points(2, {0.0, 0.0, 1.0, 0.0, -1.0, 0.0});
    const NeighborStructure ns = nn_structure(cfg, 1);
    // Sorted order: (-1,0) = 0, (0,0) = 1, (1,0) = 2. Both neighbours of the
    // middle point are at distance 1; the lexicographically smaller wins.
    CHECK(ns.nn[1] == std::vector<std::int32_t>{0});
}

TEST_CASE("symmetry of the neighbour sets") {
    const auto cfg = restrict(sample_poisson(Region::centered_cube(8.0, 2),
                                             MarkDistribution::unit(), SeedStream{61, 0}),
                              Region::centered_cube(8.0, 2));
    REQUIRE(cfg.size() > 10);
    for (int k : {1, 2, 3}) {
        const NeighborStructure ns = nn_structure(cfg, k);
        for (std::int64_t i = 0; i < cfg.size(); ++i)
            for (std::int32_t j : ns.symmetric[i]) {
                const auto& back = ns.symmetric[j];
                CHECK(std::find(back.begin(), back.end(), static_cast<std::int32_t>(i)) !=
                      back.end());
            }
        // NN lists are sorted by (distance, lexicographic) strictly.
        for (std::int64_t i = 0; i < cfg.size(); ++i) {
            for (std::size_t t = 1; t < ns.nn[i].size(); ++t) {
                auto d2 = [&](std::int32_t j) {
                    const double dx = cfg.point(i)[0] - cfg.point(j)[0];
                    const double dy = cfg.point(i)[1] - cfg.point(j)[1];
                    return dx * dx + dy * dy;
                };
                CHECK(d2(ns.nn[i][t - 1]) <= d2(ns.nn[i][t]));
            }
        }
    }
}

TEST_CASE("kd-tree equals the literal recursive definition") {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto cfg = sample_poisson(Region::centered_cube(10.0, 2),
                                        MarkDistribution::unit(), SeedStream{62, rep});
        if (cfg.size() < 5) continue;
        for (int k : {1, 2, 3}) {
            const NeighborStructure fast = nn_structure(cfg, k);
            const NeighborStructure brute = oracles::brute_nn_structure(cfg, k);
            REQUIRE(fast.nn.size() == brute.nn.size());
            for (std::size_t i = 0; i < fast.nn.size(); ++i) {
                CHECK(fast.nn[i] == brute.nn[i]);
                CHECK(fast.symmetric[i] == brute.symmetric[i]);
            }
        }
    }
}

TEST_CASE("nn length equals the undirected edge enumeration") {
    const LatticeWindow w = LatticeWindow::cube(7.0, 2);
    const auto cfg = restrict(sample_poisson(Region::window_fill(w), MarkDistribution::unit(),
                                             SeedStream{63, 0}),
                              Region::window_fill(w));
    REQUIRE(cfg.size() >= 40);
    const int k = 2;
    const NeighborStructure ns = oracles::brute_nn_structure(cfg, k);
    // Undirected edge set from the directed lists, each edge counted once.
    std::set<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::size_t i = 0; i < ns.nn.size(); ++i)
        for (std::int32_t j : ns.nn[i])
            edges.insert({std::min<std::int32_t>(i, j), std::max<std::int32_t>(i, j)});
    double total = 0.0;
    for (const auto& [a, b] : edges) {
        const double dx = cfg.point(a)[0] - cfg.point(b)[0];
        const double dy = cfg.point(a)[1] - cfg.point(b)[1];
        total += std::sqrt(dx * dx + dy * dy);
    }
    CHECK(nn_length_functional(cfg, w, k) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("small configurations contribute zero") {
    CHECK(nn_length_of(points(2, {0.0, 0.0}), 1) == 0.0);
    CHECK(nn_length_of(MarkedConfiguration(2, {}, {}, MarkKind::unit), 1) == 0.0);
    CHECK(nn_length_of(points(2, {0.0, 0.0, 1.0, 0.0}), 2) == 0.0);
    CHECK_THROWS_AS(nn_structure(points(2, {0.0, 0.0, 1.0, 0.0}), 2), invalid_parameter);
}

TEST_CASE("nn-phi score sum reproduces the nn length functional") {
    const LatticeWindow w = LatticeWindow::cube(4.0, 2);
    const auto cfg = restrict(sample_poisson(Region::window_fill(w), MarkDistribution::unit(),
                                             SeedStream{64, 1}),
                              Region::window_fill(w));
    REQUIRE(cfg.size() > 3);
    const int k = 1;
    const double via_score = score_sum(
        cfg, w, [&](const Mark&, const MarkedConfiguration& z) {
            // phi(N_k(0; z)) with the origin point member of z.
            std::int64_t self = -1;
            for (std::int64_t i = 0; i < z.size(); ++i)
                if (z.point(i)[0] == 0.0 && z.point(i)[1] == 0.0) self = i;
            REQUIRE(self >= 0);
            if (z.size() <= k) return 0.0;
            const NeighborStructure ns = nn_structure(z, k);
            double s = 0.0;
            for (std::int32_t j : ns.symmetric[self]) {
                const double dx = z.point(j)[0], dy = z.point(j)[1];
                s += std::sqrt(dx * dx + dy * dy);
            }
            return 0.5 * s;
        });
    CHECK(via_score == doctest::Approx(nn_length_functional(cfg, w, k)).epsilon(1e-12));
}
