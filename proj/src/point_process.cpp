#include "sngeo/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace sngeo {

namespace {

void normalize_discrete(std::vector<double>& values, std::vector<double>& probs,
                        std::vector<double>& cum) {
    if (values.empty() || values.size() != probs.size())
        throw invalid_parameter("MarkDistribution: values/probs size mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0)
            throw invalid_parameter("MarkDistribution: amplitude 0 not allowed");
        if (probs[i] < 0.0) throw invalid_parameter("MarkDistribution: negative prob");
        total += probs[i];
    }
    if (total <= 0.0) throw invalid_parameter("MarkDistribution: probs sum to 0");
    cum.resize(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] /= total;
        acc += probs[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;
}

double pick_discrete(std::mt19937_64& g, const std::vector<double>& values,
                     const std::vector<double>& cum) {
    const double u = uniform01(g);
    for (std::size_t i = 0; i < cum.size(); ++i)
        if (u < cum[i]) return values[i];
    return values.back();
}

struct PointRecord {
    std::vector<double> x;
    Mark m;
};

bool lex_less(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

}  // namespace

MarkDistribution MarkDistribution::unit() {
    MarkDistribution m;
    m.kind_ = MarkKind::unit;
    return m;
}

MarkDistribution MarkDistribution::radial_kernel_tag() {
    MarkDistribution m;
    m.kind_ = MarkKind::radial_kernel_tag;
    return m;
}

MarkDistribution MarkDistribution::scalar_amplitude(std::vector<double> values,
                                                    std::vector<double> probs) {
    MarkDistribution m;
    m.kind_ = MarkKind::scalar_amplitude;
    m.values_ = std::move(values);
    m.probs_ = std::move(probs);
    normalize_discrete(m.values_, m.probs_, m.cum_);
    return m;
}

MarkDistribution MarkDistribution::disc_grain(std::vector<double> amp_values,
                                              std::vector<double> amp_probs,
                                              double radius_lo, double radius_hi) {
    if (!(0.0 < radius_lo && radius_lo <= radius_hi))
        throw invalid_parameter("MarkDistribution::disc_grain: need 0 < r_lo <= r_hi");
    MarkDistribution m;
    m.kind_ = MarkKind::disc_grain;
    m.values_ = std::move(amp_values);
    m.probs_ = std::move(amp_probs);
    normalize_discrete(m.values_, m.probs_, m.cum_);
    m.radius_lo_ = radius_lo;
    m.radius_hi_ = radius_hi;
    return m;
}

Mark MarkDistribution::sample(std::mt19937_64& g) const {
    Mark m;
    switch (kind_) {
        case MarkKind::unit:
        case MarkKind::radial_kernel_tag:
            m.amplitude = 1.0;
            return m;
        case MarkKind::scalar_amplitude:
            m.amplitude = pick_discrete(g, values_, cum_);
            return m;
        case MarkKind::disc_grain:
            m.amplitude = pick_discrete(g, values_, cum_);
            m.radius = uniform_in(g, radius_lo_, radius_hi_);
            return m;
    }
    return m;
}

MarkedConfiguration::MarkedConfiguration(int dim, std::vector<double> flat_coords,
                                         std::vector<Mark> marks, MarkKind mark_kind)
    : dim_(dim), mark_kind_(mark_kind) {
    if (dim < 1) throw invalid_parameter("MarkedConfiguration: dim < 1");
    if (flat_coords.size() % dim != 0 || flat_coords.size() / dim != marks.size())
        throw invalid_parameter("MarkedConfiguration: coord/mark size mismatch");
    const std::int64_t n = static_cast<std::int64_t>(marks.size());
    std::vector<std::int64_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto pt = [&](std::int64_t i) {
        return std::span<const double>(flat_coords.data() + i * dim, dim);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t a, std::int64_t b) { return lex_less(pt(a), pt(b)); });
    coords_.resize(flat_coords.size());
    marks_.resize(marks.size());
    for (std::int64_t i = 0; i < n; ++i) {
        for (int k = 0; k < dim; ++k) coords_[i * dim + k] = flat_coords[order[i] * dim + k];
        marks_[i] = marks[order[i]];
    }
}

MarkedConfiguration MarkedConfiguration::translated(std::span<const double> shift) const {
    if (static_cast<int>(shift.size()) != dim_)
        throw invalid_parameter("translated: shift dimension mismatch");
    std::vector<double> c(coords_);
    for (std::int64_t i = 0; i < size(); ++i)
        for (int k = 0; k < dim_; ++k) c[i * dim_ + k] -= shift[k];
    return MarkedConfiguration(dim_, std::move(c), marks_, mark_kind_);
}

MarkedConfiguration sample_poisson(const Region& region, const MarkDistribution& marks,
                                   const SeedStream& seed) {
    if (!region.has_finite_volume())
        throw invalid_parameter("sample_poisson: region has infinite volume");
    const double vol = region.volume();
    if (!(vol > 0.0)) {
        if (vol == 0.0) return MarkedConfiguration(region.dim(), {}, {}, marks.kind());
        throw invalid_parameter("sample_poisson: region volume must be >= 0");
    }

    auto g = make_engine(seed);
    const std::uint64_t n = sample_poisson_count(g, vol);
    const int d = region.dim();

    std::vector<double> lo, hi;
    region.bounding_box(lo, hi);
    std::vector<double> coords;
    coords.reserve(n * d);
    std::vector<Mark> mk;
    mk.reserve(n);
    std::vector<double> x(d);

    // Rejection from the bounding box gives uniform points on the region.
    auto draw_location = [&](double* out) {
        do {
            for (int k = 0; k < d; ++k) out[k] = uniform_in(g, lo[k], hi[k]);
        } while (!region.contains({out, static_cast<std::size_t>(d)}));
    };
    for (std::uint64_t i = 0; i < n; ++i) {
        draw_location(x.data());
        coords.insert(coords.end(), x.begin(), x.end());
        mk.push_back(marks.sample(g));
    }

    // Exact coincidences (probability zero, possible in floating point) are
    // re-drawn so locations stay pairwise distinct.
    for (;;) {
        std::vector<std::int64_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
            return lex_less({coords.data() + a * d, static_cast<std::size_t>(d)},
                            {coords.data() + b * d, static_cast<std::size_t>(d)});
        });
        std::int64_t clash = -1;
        for (std::uint64_t i = 1; i < n && clash < 0; ++i) {
            if (std::equal(coords.begin() + order[i - 1] * d,
                           coords.begin() + order[i - 1] * d + d,
                           coords.begin() + order[i] * d))
                clash = order[i];
        }
        if (clash < 0) break;
        draw_location(coords.data() + clash * d);
    }
    return MarkedConfiguration(d, std::move(coords), std::move(mk), marks.kind());
}

MarkedConfiguration superpose(const MarkedConfiguration& a, const MarkedConfiguration& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dim() != b.dim())
        throw invalid_parameter("superpose: dimension mismatch");
    std::vector<double> coords(a.coords_flat().begin(), a.coords_flat().end());
    coords.insert(coords.end(), b.coords_flat().begin(), b.coords_flat().end());
    std::vector<Mark> marks;
    marks.reserve(a.size() + b.size());
    for (std::int64_t i = 0; i < a.size(); ++i) marks.push_back(a.mark(i));
    for (std::int64_t i = 0; i < b.size(); ++i) marks.push_back(b.mark(i));
    return MarkedConfiguration(a.dim(), std::move(coords), std::move(marks), a.mark_kind());
}

MarkedConfiguration restrict(const MarkedConfiguration& c, const Region& region) {
    if (c.empty()) return c;
    std::vector<double> coords;
    std::vector<Mark> marks;
    for (std::int64_t i = 0; i < c.size(); ++i) {
        auto p = c.point(i);
        if (region.contains(p)) {
            coords.insert(coords.end(), p.begin(), p.end());
            marks.push_back(c.mark(i));
        }
    }
    return MarkedConfiguration(c.dim(), std::move(coords), std::move(marks), c.mark_kind());
}

namespace {

const char* mark_kind_name(MarkKind k) {
    switch (k) {
        case MarkKind::unit: return "unit";
        case MarkKind::scalar_amplitude: return "scalar";
        case MarkKind::disc_grain: return "disc";
        case MarkKind::radial_kernel_tag: return "kernel";
    }
    return "unit";
}

MarkKind mark_kind_from_name(const std::string& s) {
    if (s == "unit") return MarkKind::unit;
    if (s == "scalar") return MarkKind::scalar_amplitude;
    if (s == "disc") return MarkKind::disc_grain;
    if (s == "kernel") return MarkKind::radial_kernel_tag;
    throw invalid_parameter("unknown mark kind: " + s);
}

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_configuration_csv(std::ostream& os, const MarkedConfiguration& c) {
    const int d = c.dim() == 0 ? 1 : c.dim();
    for (int k = 0; k < d; ++k) os << "x" << (k + 1) << ",";
    os << "mark_kind";
    const MarkKind mk = c.mark_kind();
    if (mk == MarkKind::scalar_amplitude) os << ",amplitude";
    if (mk == MarkKind::disc_grain) os << ",amplitude,radius";
    os << "\r\n";
    for (std::int64_t i = 0; i < c.size(); ++i) {
        auto p = c.point(i);
        for (int k = 0; k < d; ++k) os << fmt_real(p[k]) << ",";
        os << mark_kind_name(mk);
        if (mk == MarkKind::scalar_amplitude) os << "," << fmt_real(c.mark(i).amplitude);
        if (mk == MarkKind::disc_grain)
            os << "," << fmt_real(c.mark(i).amplitude) << "," << fmt_real(c.mark(i).radius);
        os << "\r\n";
    }
}

MarkedConfiguration read_configuration_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw invalid_parameter("configuration CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int d = 0;
    {
        std::stringstream header(line);
        std::string col;
        while (std::getline(header, col, ',')) {
            if (col.size() >= 2 && col[0] == 'x') ++d;
        }
    }
    if (d < 1) throw invalid_parameter("configuration CSV: no coordinate columns");

    std::vector<double> coords;
    std::vector<Mark> marks;
    MarkKind kind = MarkKind::unit;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        for (int k = 0; k < d; ++k) {
            if (!std::getline(row, cell, ','))
                throw invalid_parameter("configuration CSV: short row");
            coords.push_back(std::stod(cell));
        }
        if (!std::getline(row, cell, ','))
            throw invalid_parameter("configuration CSV: missing mark kind");
        kind = mark_kind_from_name(cell);
        Mark m;
        m.amplitude = 1.0;
        if (kind == MarkKind::scalar_amplitude || kind == MarkKind::disc_grain) {
            if (!std::getline(row, cell, ','))
                throw invalid_parameter("configuration CSV: missing amplitude");
            m.amplitude = std::stod(cell);
        }
        if (kind == MarkKind::disc_grain) {
            if (!std::getline(row, cell, ','))
                throw invalid_parameter("configuration CSV: missing radius");
            m.radius = std::stod(cell);
        }
        marks.push_back(m);
    }
    return MarkedConfiguration(d, std::move(coords), std::move(marks), kind);
}

}  // namespace sngeo
