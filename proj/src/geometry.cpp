#include "sngeo/geometry.hpp"

#include <algorithm>
#include <numbers>
#include <set>

namespace sngeo {

namespace {

// Lexicographic comparison of flat cell records.
struct CellLess {
    int dim;
    bool operator()(std::span<const int> a, std::span<const int> b) const {
        for (int i = 0; i < dim; ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }
};

double ball_volume(int d, double r) {
    // Unit-ball volume kappa_d = pi^{d/2} / Gamma(d/2 + 1).
    const double kd = std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
    return kd * std::pow(r, d);
}

}  // namespace

LatticeWindow LatticeWindow::cube(double side, int dim) {
    if (side < 1.0 || dim < 1)
        throw invalid_parameter("LatticeWindow::cube: require side >= 1 and dim >= 1");
    LatticeWindow w;
    w.dim_ = dim;
    w.is_box_ = true;
    // Integers in [-a/2, a/2): lo = ceil(-a/2), hi = ceil(a/2) - 1.
    const int lo = static_cast<int>(std::ceil(-side / 2.0));
    const int hi = static_cast<int>(std::ceil(side / 2.0)) - 1;
    w.lo_.assign(dim, lo);
    w.hi_.assign(dim, hi);
    const std::int64_t per_axis = hi - lo + 1;
    std::int64_t total = 1;
    for (int i = 0; i < dim; ++i) total *= per_axis;
    w.cells_.resize(total * dim);
    std::vector<int> k(dim, lo);
    for (std::int64_t idx = 0; idx < total; ++idx) {
        for (int i = 0; i < dim; ++i) w.cells_[idx * dim + i] = k[i];
        for (int i = dim - 1; i >= 0; --i) {
            if (++k[i] <= hi) break;
            k[i] = lo;
        }
    }
    return w;
}

LatticeWindow LatticeWindow::from_cells(int dim, std::vector<int> flat_cells) {
    if (dim < 1 || flat_cells.empty() || flat_cells.size() % dim != 0)
        throw invalid_parameter("LatticeWindow::from_cells: bad cell list");
    LatticeWindow w;
    w.dim_ = dim;
    const std::int64_t n = static_cast<std::int64_t>(flat_cells.size()) / dim;
    std::vector<std::int64_t> order(n);
    for (std::int64_t i = 0; i < n; ++i) order[i] = i;
    CellLess less{dim};
    auto cell_of = [&](std::int64_t i) {
        return std::span<const int>(flat_cells.data() + i * dim, dim);
    };
    std::sort(order.begin(), order.end(),
              [&](std::int64_t a, std::int64_t b) { return less(cell_of(a), cell_of(b)); });
    w.cells_.reserve(flat_cells.size());
    for (std::int64_t i = 0; i < n; ++i) {
        auto c = cell_of(order[i]);
        if (!w.cells_.empty()) {
            std::span<const int> prev(w.cells_.data() + w.cells_.size() - dim, dim);
            if (std::equal(prev.begin(), prev.end(), c.begin())) continue;
        }
        w.cells_.insert(w.cells_.end(), c.begin(), c.end());
    }
    // Detect box fills so grid code can use this window too.
    w.lo_.assign(dim, 0);
    w.hi_.assign(dim, 0);
    for (int i = 0; i < dim; ++i) {
        int lo = w.cells_[i], hi = w.cells_[i];
        for (std::int64_t c = 0; c < w.cell_count(); ++c) {
            lo = std::min(lo, w.cells_[c * dim + i]);
            hi = std::max(hi, w.cells_[c * dim + i]);
        }
        w.lo_[i] = lo;
        w.hi_[i] = hi;
    }
    std::int64_t box_count = 1;
    for (int i = 0; i < dim; ++i) box_count *= (w.hi_[i] - w.lo_[i] + 1);
    w.is_box_ = (box_count == w.cell_count());
    return w;
}

bool LatticeWindow::contains_cell(std::span<const int> k) const {
    if (is_box_) {
        for (int i = 0; i < dim_; ++i)
            if (k[i] < lo_[i] || k[i] > hi_[i]) return false;
        return true;
    }
    CellLess less{dim_};
    std::int64_t a = 0, b = cell_count();
    while (a < b) {
        const std::int64_t m = (a + b) / 2;
        if (less(cell(m), k))
            a = m + 1;
        else
            b = m;
    }
    return a < cell_count() && std::equal(k.begin(), k.end(), cell(a).begin());
}

bool LatticeWindow::fill_contains(std::span<const double> x) const {
    // Cell of x under the half-open convention: nearest integer with ties
    // resolved downward-open, i.e. k_i - 1/2 <= x_i < k_i + 1/2.
    std::vector<int> k(dim_);
    for (int i = 0; i < dim_; ++i) k[i] = static_cast<int>(std::floor(x[i] + 0.5));
    return contains_cell(k);
}

bool LatticeWindow::open_fill_contains(std::span<const double> x) const {
    if (!is_box_)
        throw invalid_parameter("open_fill_contains: window fill is not a box");
    for (int i = 0; i < dim_; ++i) {
        if (!(x[i] > lo_[i] - 0.5 && x[i] < hi_[i] + 0.5)) return false;
    }
    return true;
}

std::vector<int> LatticeWindow::lattice_boundary() const {
    std::vector<int> out;
    std::vector<int> nb(dim_);
    for (std::int64_t c = 0; c < cell_count(); ++c) {
        auto k = cell(c);
        bool boundary = false;
        for (int i = 0; i < dim_ && !boundary; ++i) {
            for (int s : {-1, +1}) {
                std::copy(k.begin(), k.end(), nb.begin());
                nb[i] += s;
                if (!contains_cell(nb)) {
                    boundary = true;
                    break;
                }
            }
        }
        if (boundary) out.insert(out.end(), k.begin(), k.end());
    }
    return out;
}

Region Region::box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty())
        throw invalid_parameter("Region::box: dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw invalid_parameter("Region::box: empty box");
    Region r;
    r.kind_ = Kind::box;
    r.dim_ = static_cast<int>(lo.size());
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
}

Region Region::centered_cube(double side, int dim) {
    if (side <= 0.0 || dim < 1)
        throw invalid_parameter("Region::centered_cube: bad parameters");
    return box(std::vector<double>(dim, -side / 2.0), std::vector<double>(dim, side / 2.0));
}

Region Region::ball(std::vector<double> center, double radius) {
    if (center.empty() || radius <= 0.0)
        throw invalid_parameter("Region::ball: bad parameters");
    Region r;
    r.kind_ = Kind::ball;
    r.dim_ = static_cast<int>(center.size());
    r.center_ = std::move(center);
    r.radius_ = radius;
    return r;
}

Region Region::ball_complement(std::vector<double> center, double radius) {
    Region r = ball(std::move(center), radius);
    r.kind_ = Kind::ball_complement;
    return r;
}

Region Region::box_annulus(double inner_side, double outer_side, int dim) {
    if (!(0.0 < inner_side && inner_side < outer_side) || dim < 1)
        throw invalid_parameter("Region::box_annulus: need 0 < inner < outer");
    Region r;
    r.kind_ = Kind::box_annulus;
    r.dim_ = dim;
    r.lo_.assign(dim, -outer_side / 2.0);
    r.hi_.assign(dim, outer_side / 2.0);
    r.inner_lo_.assign(dim, -inner_side / 2.0);
    r.inner_hi_.assign(dim, inner_side / 2.0);
    return r;
}

Region Region::window_fill(const LatticeWindow& w) {
    if (w.is_box()) {
        std::vector<double> lo(w.dim()), hi(w.dim());
        for (int i = 0; i < w.dim(); ++i) {
            lo[i] = w.lo()[i] - 0.5;
            hi[i] = w.hi()[i] + 0.5;
        }
        return box(std::move(lo), std::move(hi));
    }
    Region r;
    r.kind_ = Kind::window_fill;
    r.dim_ = w.dim();
    r.window_dim_ = w.dim();
    r.window_cells_.assign(w.cells_flat().begin(), w.cells_flat().end());
    r.lo_.assign(w.dim(), 0.0);
    r.hi_.assign(w.dim(), 0.0);
    for (int i = 0; i < w.dim(); ++i) {
        int lo = w.cells_flat()[i], hi = lo;
        for (std::int64_t c = 0; c < w.cell_count(); ++c) {
            lo = std::min(lo, w.cells_flat()[c * w.dim() + i]);
            hi = std::max(hi, w.cells_flat()[c * w.dim() + i]);
        }
        r.lo_[i] = lo - 0.5;
        r.hi_[i] = hi + 0.5;
    }
    return r;
}

Region Region::padded_fill(const LatticeWindow& w, double pad) {
    if (pad < 0.0) throw invalid_parameter("Region::padded_fill: pad < 0");
    Region base = window_fill(w);
    std::vector<double> lo(base.lo_), hi(base.hi_);
    for (auto& v : lo) v -= pad;
    for (auto& v : hi) v += pad;
    return box(std::move(lo), std::move(hi));
}

bool Region::contains(std::span<const double> x) const {
    switch (kind_) {
        case Kind::box:
            for (int i = 0; i < dim_; ++i)
                if (!(x[i] >= lo_[i] && x[i] < hi_[i])) return false;
            return true;
        case Kind::ball:
        case Kind::ball_complement: {
            double d2 = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double t = x[i] - center_[i];
                d2 += t * t;
            }
            const bool in_ball = d2 <= radius_ * radius_;
            return kind_ == Kind::ball ? in_ball : !in_ball;
        }
        case Kind::box_annulus: {
            bool in_outer = true, in_inner = true;
            for (int i = 0; i < dim_; ++i) {
                in_outer = in_outer && x[i] >= lo_[i] && x[i] < hi_[i];
                in_inner = in_inner && x[i] >= inner_lo_[i] && x[i] < inner_hi_[i];
            }
            return in_outer && !in_inner;
        }
        case Kind::window_fill: {
            std::vector<int> k(dim_);
            for (int i = 0; i < dim_; ++i) k[i] = static_cast<int>(std::floor(x[i] + 0.5));
            const std::int64_t n = static_cast<std::int64_t>(window_cells_.size()) / dim_;
            for (std::int64_t c = 0; c < n; ++c) {
                bool eq = true;
                for (int i = 0; i < dim_; ++i)
                    eq = eq && window_cells_[c * dim_ + i] == k[i];
                if (eq) return true;
            }
            return false;
        }
    }
    return false;
}

double Region::volume() const {
    switch (kind_) {
        case Kind::box: {
            double v = 1.0;
            for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
            return v;
        }
        case Kind::ball:
            return ball_volume(dim_, radius_);
        case Kind::ball_complement:
            throw invalid_parameter("Region::volume: ball complement has infinite volume");
        case Kind::box_annulus: {
            double vo = 1.0, vi = 1.0;
            for (int i = 0; i < dim_; ++i) {
                vo *= hi_[i] - lo_[i];
                vi *= inner_hi_[i] - inner_lo_[i];
            }
            return vo - vi;
        }
        case Kind::window_fill:
            return static_cast<double>(window_cells_.size()) / dim_;
    }
    return 0.0;
}

void Region::bounding_box(std::vector<double>& lo, std::vector<double>& hi) const {
    switch (kind_) {
        case Kind::box:
        case Kind::box_annulus:
        case Kind::window_fill:
            lo = lo_;
            hi = hi_;
            return;
        case Kind::ball:
            lo.resize(dim_);
            hi.resize(dim_);
            for (int i = 0; i < dim_; ++i) {
                lo[i] = center_[i] - radius_;
                hi[i] = center_[i] + radius_;
            }
            return;
        case Kind::ball_complement:
            throw invalid_parameter("Region::bounding_box: unbounded region");
    }
}

}  // namespace sngeo
