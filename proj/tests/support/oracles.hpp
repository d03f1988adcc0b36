// Test-only oracles, independent of the library implementation paths they
// check: literal recursive nearest-neighbour search, cubical-complex Euler
// characteristic of a thresholded grid, finite differences, and a generic
// token-configuration generator with an explicit genericity margin.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "sngeo/estimators.hpp"

namespace oracles {

// Literal transcription of the recursive nearest-neighbour definition: the
// nearest point under (distance, lexicographic) order, removed and repeated.
inline std::vector<std::int32_t> brute_nn_list(const sngeo::MarkedConfiguration& cfg,
                                               std::int64_t self, int k) {
    std::vector<std::int32_t> remaining;
    for (std::int64_t i = 0; i < cfg.size(); ++i)
        if (i != self) remaining.push_back(static_cast<std::int32_t>(i));
    auto dist2 = [&](std::int32_t i) {
        auto a = cfg.point(self);
        auto b = cfg.point(i);
        double s = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
        return s;
    };
    auto better = [&](std::int32_t i, std::int32_t j) {
        const double di = dist2(i), dj = dist2(j);
        if (di != dj) return di < dj;
        auto a = cfg.point(i), b = cfg.point(j);
        for (std::size_t t = 0; t < a.size(); ++t)
            if (a[t] != b[t]) return a[t] < b[t];
        return false;
    };
    std::vector<std::int32_t> out;
    for (int step = 0; step < k && !remaining.empty(); ++step) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i)
            if (better(remaining[i], remaining[best])) best = i;
        out.push_back(remaining[best]);
        remaining.erase(remaining.begin() + best);
    }
    return out;
}

inline sngeo::NeighborStructure brute_nn_structure(const sngeo::MarkedConfiguration& cfg,
                                                   int k) {
    sngeo::NeighborStructure ns;
    ns.k = k;
    const std::int64_t n = cfg.size();
    ns.nn.resize(n);
    ns.symmetric.resize(n);
    for (std::int64_t i = 0; i < n; ++i) ns.nn[i] = brute_nn_list(cfg, i, k);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int32_t j : ns.nn[i]) {
            ns.symmetric[i].push_back(j);
            ns.symmetric[j].push_back(static_cast<std::int32_t>(i));
        }
    for (auto& v : ns.symmetric) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return ns;
}

// Euler characteristic of the union of closed pixels {node value >= u}:
// vertices - edges + faces of the induced cubical complex.
inline long grid_euler_characteristic(const sngeo::FieldGrid& grid, double u) {
    const std::int64_t nx = grid.extents()[0];
    const std::int64_t ny = grid.extents()[1];
    auto filled = [&](std::int64_t ix, std::int64_t iy) {
        if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return false;
        return grid.values()[ix * ny + iy] >= u;
    };
    long faces = 0, edges = 0, vertices = 0;
    for (std::int64_t ix = 0; ix <= nx; ++ix) {
        for (std::int64_t iy = 0; iy <= ny; ++iy) {
            const bool p00 = filled(ix, iy);
            const bool pm0 = filled(ix - 1, iy);
            const bool p0m = filled(ix, iy - 1);
            const bool pmm = filled(ix - 1, iy - 1);
            if (p00) ++faces;
            // vertical edge between pixel columns ix-1 and ix at row iy
            if (p00 || pm0) ++edges;
            // horizontal edge between pixel rows iy-1 and iy
            if (p00 || p0m) ++edges;
            // corner vertex shared by the four pixels
            if (p00 || pm0 || p0m || pmm) ++vertices;
        }
    }
    return vertices - edges + faces;
}

// Standard normal quantile by bisection on the CDF.
inline double normal_quantile(double p) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sngeo::normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Central finite difference gradient of a field evaluation.
inline std::vector<double> fd_gradient(const sngeo::MarkedConfiguration& cfg,
                                       const sngeo::RadialKernel& kernel,
                                       std::span<const double> y, double step) {
    std::vector<double> g(y.size());
    std::vector<double> q(y.begin(), y.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        q[i] = y[i] + step;
        const double fp = sngeo::eval_field(cfg, kernel, q);
        q[i] = y[i] - step;
        const double fm = sngeo::eval_field(cfg, kernel, q);
        q[i] = y[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

// Token configuration on the window with every disc strictly inside the fill
// and a genericity margin: no two circles within `margin` of tangency and no
// triple of circles near-concurrent at the sampled resolution. Amplitudes
// +1 / -1 with probability 0.7 / 0.3, radii uniform in [0.35, 0.9].
inline sngeo::MarkedConfiguration generic_token_config(const sngeo::LatticeWindow& window,
                                                       std::uint64_t master,
                                                       std::uint64_t index, double margin) {
    using namespace sngeo;
    const MarkDistribution marks =
        MarkDistribution::disc_grain({1.0, -1.0}, {0.7, 0.3}, 0.35, 0.9);
    const double shrink = 0.9 + margin + 0.05;  // max radius + clearance
    const double side_x = (window.hi()[0] - window.lo()[0] + 1) - 2.0 * shrink;
    const double side_y = (window.hi()[1] - window.lo()[1] + 1) - 2.0 * shrink;
    const double cx = 0.5 * (window.lo()[0] + window.hi()[0]);
    const double cy = 0.5 * (window.lo()[1] + window.hi()[1]);
    for (std::uint64_t attempt = 0;; ++attempt) {
        const SeedStream seed = SeedStream{master, index}.retry(attempt);
        const Region box = Region::box({cx - side_x / 2.0, cy - side_y / 2.0},
                                       {cx + side_x / 2.0, cy + side_y / 2.0});
        MarkedConfiguration cfg = sample_poisson(box, marks, seed);
        if (cfg.size() < 2) continue;
        bool ok = true;
        for (std::int64_t i = 0; i < cfg.size() && ok; ++i) {
            for (std::int64_t j = i + 1; j < cfg.size() && ok; ++j) {
                const double dx = cfg.point(i)[0] - cfg.point(j)[0];
                const double dy = cfg.point(i)[1] - cfg.point(j)[1];
                const double dist = std::hypot(dx, dy);
                const double rs = cfg.mark(i).radius + cfg.mark(j).radius;
                const double rd = std::abs(cfg.mark(i).radius - cfg.mark(j).radius);
                if (std::abs(dist - rs) < margin || std::abs(dist - rd) < margin ||
                    dist < margin)
                    ok = false;
            }
        }
        if (ok) return cfg;
    }
}

}  // namespace oracles
