#include "sngeo/field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>

namespace sngeo {

namespace {

constexpr double kSingularDist2 = 1e-24;  // (1e-12)^2
constexpr double kNodeJitter[4] = {2.5e-10, 1.5e-10, 0.5e-10, 0.25e-10};

double surface_sphere(int d) {
    // sigma_{d-1} = H^{d-1}(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2).
    return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double ipow(double x, int n) {
    double r = 1.0;
    while (n > 0) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

bool nearly_integer(double x, int& out) {
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-12 && r >= 0.0 && r < 1024.0) {
        out = static_cast<int>(r);
        return true;
    }
    return false;
}

}  // namespace

RadialKernel RadialKernel::power(double nu, double lambda, double amplitude, int dim,
                                 double eps_tail) {
    if (nu <= 0.0 || amplitude <= 0.0 || dim < 1 || eps_tail <= 0.0)
        throw invalid_parameter("RadialKernel::power: bad parameters");
    if (lambda <= 11.0 * dim)
        throw invalid_parameter("RadialKernel::power: outer exponent must exceed 11 d");
    RadialKernel k;
    k.nu_ = nu;
    k.outer_ = Outer::power;
    k.lambda_ = lambda;
    k.amplitude_ = amplitude;
    k.dim_ = dim;
    k.eps_tail_ = eps_tail;
    int twice = 0;
    if (nearly_integer(2.0 * nu, twice)) k.nu_ipow_ = twice;
    int li = 0;
    if (nearly_integer(lambda, li)) k.lambda_ipow_ = li;
    // Solve tail_mass(R) = eps_tail (closed form for power tails).
    // integral_R^inf C rho^{-lambda} sigma rho^{d-1} drho = C sigma R^{d-lambda}/(lambda-d).
    const double sigma = surface_sphere(dim);
    const double R = std::pow(amplitude * sigma / ((lambda - dim) * eps_tail),
                              1.0 / (lambda - dim));
    k.trunc_radius_ = std::max(1.0, R);
    return k;
}

RadialKernel RadialKernel::stretched_exp(double nu, double rate, double gamma,
                                         double amplitude, int dim, double eps_tail) {
    if (nu <= 0.0 || amplitude <= 0.0 || dim < 1 || eps_tail <= 0.0 || rate <= 0.0)
        throw invalid_parameter("RadialKernel::stretched_exp: bad parameters");
    if (!(gamma > 0.0 && gamma < dim))
        throw invalid_parameter("RadialKernel::stretched_exp: need 0 < gamma < d");
    RadialKernel k;
    k.nu_ = nu;
    k.outer_ = Outer::stretched_exp;
    k.rate_ = rate;
    k.gamma_ = gamma;
    k.amplitude_ = amplitude;
    k.dim_ = dim;
    k.eps_tail_ = eps_tail;
    int twice = 0;
    if (nearly_integer(2.0 * nu, twice)) k.nu_ipow_ = twice;
    // Bisection on the numeric tail mass.
    double hi = 2.0;
    while (k.tail_mass(hi) > eps_tail) {
        hi *= 1.5;
        if (hi > 1e6) throw invalid_parameter("stretched_exp: tail does not reach eps_tail");
    }
    double lo = 1.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (k.tail_mass(mid) > eps_tail)
            lo = mid;
        else
            hi = mid;
    }
    k.trunc_radius_ = std::max(1.0, hi);
    return k;
}

double RadialKernel::value(double rho) const {
    if (rho <= 1.0) {
        if (nu_ipow_ >= 0) return amplitude_ / ipow(std::sqrt(rho), nu_ipow_);
        return amplitude_ * std::pow(rho, -nu_);
    }
    if (outer_ == Outer::power) {
        if (lambda_ipow_ >= 0) return amplitude_ / ipow(rho, lambda_ipow_);
        return amplitude_ * std::pow(rho, -lambda_);
    }
    double t;
    if (gamma_ == 1.0)
        t = rho;
    else if (gamma_ == 0.5)
        t = std::sqrt(rho);
    else if (gamma_ == 1.5)
        t = rho * std::sqrt(rho);
    else
        t = std::pow(rho, gamma_);
    return amplitude_ * std::exp(rate_ * (1.0 - t));
}

double RadialKernel::derivative(double rho) const {
    if (rho <= 1.0) return -nu_ * amplitude_ * std::pow(rho, -nu_ - 1.0);
    if (outer_ == Outer::power) return -lambda_ * amplitude_ * std::pow(rho, -lambda_ - 1.0);
    const double t = std::pow(rho, gamma_);
    return -rate_ * gamma_ * std::pow(rho, gamma_ - 1.0) * amplitude_ * std::exp(rate_ * (1.0 - t));
}

double RadialKernel::tail_mass(double R) const {
    const double sigma = surface_sphere(dim_);
    if (R < 1.0) R = 1.0;
    if (outer_ == Outer::power)
        return amplitude_ * sigma * std::pow(R, dim_ - lambda_) / (lambda_ - dim_);
    // Trapezoid integration of the stretched-exponential tail.
    const double step = 1.0 / 256.0;
    double total = 0.0;
    double prev = value(R) * std::pow(R, dim_ - 1);
    const double cutoff = prev * 1e-18;
    for (double rho = R + step;; rho += step) {
        const double cur = value(rho) * std::pow(rho, dim_ - 1);
        total += 0.5 * (prev + cur) * step;
        prev = cur;
        if (cur < cutoff || rho > R + 1e4) break;
    }
    return sigma * total;
}

PointIndex::PointIndex(const MarkedConfiguration& config) : config_(&config), dim_(config.dim()) {
    if (dim_ < 1 || dim_ > 4)
        throw invalid_parameter("PointIndex: dimension must be between 1 and 4");
    std::vector<int> c(dim_);
    for (std::int64_t i = 0; i < config.size(); ++i) {
        auto p = config.point(i);
        for (int k = 0; k < dim_; ++k) c[k] = static_cast<int>(std::floor(p[k]));
        cells_[cell_key(c)].push_back(static_cast<std::int32_t>(i));
        if (config.mark_kind() == MarkKind::disc_grain)
            max_mark_radius_ = std::max(max_mark_radius_, config.mark(i).radius);
    }
}

std::int64_t PointIndex::cell_key(std::span<const int> c) const {
    // 21 bits per axis, offset to stay positive; supports coordinates +-1e6.
    std::int64_t key = 0;
    for (int i = 0; i < dim_; ++i) {
        const std::int64_t v = static_cast<std::int64_t>(c[i]) + (1 << 20);
        key = (key << 21) | v;
    }
    return key;
}

FieldEvaluator::FieldEvaluator(const MarkedConfiguration& config, const RadialKernel& kernel)
    : config_(&config), radial_(kernel), index_(config) {}

FieldEvaluator::FieldEvaluator(const MarkedConfiguration& config, TokenKernel)
    : config_(&config), index_(config) {
    if (config.dim() != 2 && !config.empty())
        throw invalid_parameter("token fields are supported in d = 2 only");
}

double FieldEvaluator::value(std::span<const double> y) const {
    const int d = config_->dim() == 0 ? static_cast<int>(y.size()) : config_->dim();
    double acc = 0.0;
    if (radial_) {
        const double R = radial_->trunc_radius();
        const double R2 = R * R;
        bool singular = false;
        index_.for_each_candidate(y, R, [&](std::int32_t p) {
            auto x = config_->point(p);
            double r2 = 0.0;
            for (int k = 0; k < d; ++k) {
                const double t = y[k] - x[k];
                r2 += t * t;
            }
            if (r2 > R2) return;
            if (r2 < kSingularDist2) {
                singular = true;
                return;
            }
            acc += config_->mark(p).amplitude * radial_->value(std::sqrt(r2));
        });
        if (singular)
            throw singular_evaluation("eval_field: query point within 1e-12 of an atom");
        return acc;
    }
    const double R = index_.max_mark_radius();
    index_.for_each_candidate(y, R, [&](std::int32_t p) {
        auto x = config_->point(p);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double t = y[k] - x[k];
            r2 += t * t;
        }
        const double r = config_->mark(p).radius;
        if (r2 <= r * r) acc += config_->mark(p).amplitude;
    });
    return acc;
}

std::vector<double> FieldEvaluator::gradient(std::span<const double> y) const {
    if (!radial_)
        throw invalid_parameter("eval_gradient: unsupported for token kernels");
    const int d = config_->dim() == 0 ? static_cast<int>(y.size()) : config_->dim();
    std::vector<double> grad(d, 0.0);
    const double R = radial_->trunc_radius();
    const double R2 = R * R;
    bool singular = false;
    index_.for_each_candidate(y, R, [&](std::int32_t p) {
        auto x = config_->point(p);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double t = y[k] - x[k];
            r2 += t * t;
        }
        if (r2 > R2) return;
        if (r2 < kSingularDist2) {
            singular = true;
            return;
        }
        const double rho = std::sqrt(r2);
        const double w = config_->mark(p).amplitude * radial_->derivative(rho) / rho;
        for (int k = 0; k < d; ++k) grad[k] += w * (y[k] - x[k]);
    });
    if (singular)
        throw singular_evaluation("eval_gradient: query point within 1e-12 of an atom");
    return grad;
}

double FieldEvaluator::value_excluding(std::span<const double> y, std::int64_t skip0,
                                       std::int64_t skip1) const {
    if (radial_)
        throw invalid_parameter("value_excluding is a token-field operation");
    const int d = 2;
    double acc = 0.0;
    const double R = index_.max_mark_radius();
    index_.for_each_candidate(y, R, [&](std::int32_t p) {
        if (p == skip0 || p == skip1) return;
        auto x = config_->point(p);
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double t = y[k] - x[k];
            r2 += t * t;
        }
        const double r = config_->mark(p).radius;
        if (r2 <= r * r) acc += config_->mark(p).amplitude;
    });
    return acc;
}

double eval_field(const MarkedConfiguration& config, const RadialKernel& kernel,
                  std::span<const double> y) {
    return FieldEvaluator(config, kernel).value(y);
}

double eval_field(const MarkedConfiguration& config, TokenKernel tk,
                  std::span<const double> y) {
    return FieldEvaluator(config, tk).value(y);
}

std::vector<double> eval_gradient(const MarkedConfiguration& config, const RadialKernel& kernel,
                                  std::span<const double> y) {
    return FieldEvaluator(config, kernel).gradient(y);
}

double FieldGrid::node_coord(int axis, std::int64_t j) const {
    return (window_lo_[axis] - 0.5) + (static_cast<double>(j) + 0.5) * spacing_ +
           kNodeJitter[axis];
}

void FieldGrid::node_coords(std::int64_t flat, std::vector<double>& out) const {
    out.resize(dim_);
    for (int axis = dim_ - 1; axis >= 0; --axis) {
        const std::int64_t j = flat % extents_[axis];
        flat /= extents_[axis];
        out[axis] = node_coord(axis, j);
    }
}

std::int64_t FieldGrid::flat_index(std::span<const std::int64_t> idx) const {
    std::int64_t flat = 0;
    for (int axis = 0; axis < dim_; ++axis) flat = flat * extents_[axis] + idx[axis];
    return flat;
}

double FieldGrid::value_at(std::span<const std::int64_t> idx) const {
    return values_[flat_index(idx)];
}

FieldGrid FieldGrid::allocate(const LatticeWindow& window, double spacing,
                              bool with_gradients) {
    if (!(spacing > 0.0)) throw invalid_parameter("build_grid: spacing must be > 0");
    const double inv = 1.0 / spacing;
    const double m_round = std::round(inv);
    if (std::abs(inv - m_round) > 1e-9 || m_round < 1.0)
        throw invalid_parameter("build_grid: spacing must divide 1");
    if (!window.is_box())
        throw invalid_parameter("build_grid: window fill must be a box");
    const int d = window.dim();
    if (d > 3) throw invalid_parameter("build_grid: dimension must be at most 3");

    FieldGrid grid;
    grid.dim_ = d;
    grid.spacing_ = spacing;
    grid.nodes_per_cell_axis_ = static_cast<std::int64_t>(m_round);
    grid.window_lo_.assign(window.lo().begin(), window.lo().end());
    grid.window_hi_.assign(window.hi().begin(), window.hi().end());
    grid.extents_.resize(d);
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) {
        grid.extents_[i] =
            (grid.window_hi_[i] - grid.window_lo_[i] + 1) * grid.nodes_per_cell_axis_;
        total *= grid.extents_[i];
    }
    grid.values_.assign(total, 0.0);
    if (with_gradients) grid.gradients_.assign(total * d, 0.0);
    return grid;
}

namespace {

// Blocked builder: one window cell at a time, candidates gathered once per
// cell. Accumulation visits accepted points in the same canonical order as
// the single-point evaluator, so both routes produce identical bits.
FieldGrid build_grid_blocked(const MarkedConfiguration& config, const RadialKernel* kernel,
                             const LatticeWindow& window, double spacing,
                             bool with_gradients, bool parallel) {
    const bool token = kernel == nullptr;
    FieldGrid grid = FieldGrid::allocate(window, spacing, with_gradients && !token);
    const int d = grid.dim();
    if (token && d != 2 && !config.empty())
        throw invalid_parameter("build_grid: token fields need d = 2");

    PointIndex index(config);
    const double reach = token ? index.max_mark_radius() : kernel->trunc_radius();
    const double reach2 = reach * reach;
    const double gather_pad = 0.5 * std::sqrt(static_cast<double>(d));

    std::array<std::int64_t, 3> cell_extent{1, 1, 1};
    std::int64_t n_cells = 1;
    for (int i = 0; i < d; ++i) {
        cell_extent[i] = grid.window_hi()[i] - grid.window_lo()[i] + 1;
        n_cells *= cell_extent[i];
    }
    const std::int64_t m = grid.nodes_per_cell_axis();
    std::int64_t nodes_per_cell = 1;
    for (int i = 0; i < d; ++i) nodes_per_cell *= m;

    double* values = grid.values_mut().data();
    double* grads = grid.has_gradients() ? grid.gradients_mut().data() : nullptr;
    std::atomic<bool> singular{false};

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t cflat = 0; cflat < n_cells; ++cflat) {
        // Decode cell coordinates.
        std::array<int, 3> cell{0, 0, 0};
        std::int64_t rem = cflat;
        for (int i = d - 1; i >= 0; --i) {
            cell[i] = grid.window_lo()[i] + static_cast<int>(rem % cell_extent[i]);
            rem /= cell_extent[i];
        }
        // Gather candidates around the cell center.
        std::array<double, 3> center{0.0, 0.0, 0.0};
        for (int i = 0; i < d; ++i) center[i] = cell[i];
        std::vector<double> cx;
        std::vector<double> camp, crad2;
        index.for_each_candidate({center.data(), static_cast<std::size_t>(d)},
                                 reach + gather_pad, [&](std::int32_t p) {
                                     auto x = config.point(p);
                                     cx.insert(cx.end(), x.begin(), x.end());
                                     camp.push_back(config.mark(p).amplitude);
                                     if (token) {
                                         const double r = config.mark(p).radius;
                                         crad2.push_back(r * r);
                                     }
                                 });
        const std::int64_t n_cand = static_cast<std::int64_t>(camp.size());

        // Node loop within the cell.
        std::array<std::int64_t, 3> j{0, 0, 0};
        std::array<double, 3> y{0.0, 0.0, 0.0};
        for (std::int64_t local = 0; local < nodes_per_cell; ++local) {
            std::int64_t flat = 0;
            for (int i = 0; i < d; ++i) {
                const std::int64_t g = (cell[i] - grid.window_lo()[i]) * m + j[i];
                flat = flat * grid.extents()[i] + g;
                y[i] = grid.node_coord(i, g);
            }
            double acc = 0.0;
            double gx = 0.0, gy = 0.0, gz = 0.0;
            for (std::int64_t p = 0; p < n_cand; ++p) {
                double r2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double t = y[i] - cx[p * d + i];
                    r2 += t * t;
                }
                if (token) {
                    if (r2 <= crad2[p]) acc += camp[p];
                    continue;
                }
                if (r2 > reach2) continue;
                if (r2 < kSingularDist2) {
                    singular.store(true, std::memory_order_relaxed);
                    continue;
                }
                const double rho = std::sqrt(r2);
                acc += camp[p] * kernel->value(rho);
                if (grads) {
                    const double w = camp[p] * kernel->derivative(rho) / rho;
                    gx += w * (y[0] - cx[p * d + 0]);
                    if (d > 1) gy += w * (y[1] - cx[p * d + 1]);
                    if (d > 2) gz += w * (y[2] - cx[p * d + 2]);
                }
            }
            values[flat] = acc;
            if (grads) {
                grads[flat * d + 0] = gx;
                if (d > 1) grads[flat * d + 1] = gy;
                if (d > 2) grads[flat * d + 2] = gz;
            }
            for (int i = d - 1; i >= 0; --i) {
                if (++j[i] < m) break;
                j[i] = 0;
            }
        }
    }
    if (singular.load())
        throw singular_evaluation("build_grid: node within 1e-12 of an atom after jitter");
    return grid;
}

// Naive reference: every node goes through the single-point evaluator.
FieldGrid build_grid_naive(const MarkedConfiguration& config, const RadialKernel* kernel,
                           const LatticeWindow& window, double spacing, bool with_gradients) {
    const bool token = kernel == nullptr;
    FieldGrid grid = FieldGrid::allocate(window, spacing, with_gradients && !token);
    FieldEvaluator ev = token ? FieldEvaluator(config, TokenKernel{})
                              : FieldEvaluator(config, *kernel);
    std::vector<double> y;
    for (std::int64_t flat = 0; flat < grid.node_count(); ++flat) {
        grid.node_coords(flat, y);
        grid.values_mut()[flat] = ev.value(y);
        if (grid.has_gradients()) {
            const auto g = ev.gradient(y);
            for (int i = 0; i < grid.dim(); ++i)
                grid.gradients_mut()[flat * grid.dim() + i] = g[i];
        }
    }
    return grid;
}

}  // namespace

FieldGrid build_grid(const MarkedConfiguration& config, const RadialKernel& kernel,
                     const LatticeWindow& window, double spacing, bool with_gradients) {
    return build_grid_blocked(config, &kernel, window, spacing, with_gradients, true);
}

FieldGrid build_grid(const MarkedConfiguration& config, TokenKernel, const LatticeWindow& window,
                     double spacing) {
    return build_grid_blocked(config, nullptr, window, spacing, false, true);
}

FieldGrid build_grid_serial(const MarkedConfiguration& config, const RadialKernel& kernel,
                            const LatticeWindow& window, double spacing, bool with_gradients) {
    return build_grid_naive(config, &kernel, window, spacing, with_gradients);
}

FieldGrid build_grid_serial(const MarkedConfiguration& config, TokenKernel,
                            const LatticeWindow& window, double spacing) {
    return build_grid_naive(config, nullptr, window, spacing, false);
}

namespace {

template <typename T>
void put_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

// Layout (little-endian): magic "SNGRID01", i32 dim, f64 spacing,
// i64 nodes_per_cell_axis, per axis {i32 lo, i32 hi, i64 extent},
// u8 has_gradients, i64 node count, values, then gradients if present.
void FieldGrid::write_binary(std::ostream& os) const {
    os.write("SNGRID01", 8);
    put_raw(os, static_cast<std::int32_t>(dim_));
    put_raw(os, spacing_);
    put_raw(os, nodes_per_cell_axis_);
    for (int i = 0; i < dim_; ++i) {
        put_raw(os, static_cast<std::int32_t>(window_lo_[i]));
        put_raw(os, static_cast<std::int32_t>(window_hi_[i]));
        put_raw(os, extents_[i]);
    }
    put_raw(os, static_cast<std::uint8_t>(has_gradients() ? 1 : 0));
    put_raw(os, static_cast<std::int64_t>(values_.size()));
    os.write(reinterpret_cast<const char*>(values_.data()),
             static_cast<std::streamsize>(values_.size() * sizeof(double)));
    if (has_gradients())
        os.write(reinterpret_cast<const char*>(gradients_.data()),
                 static_cast<std::streamsize>(gradients_.size() * sizeof(double)));
}

FieldGrid FieldGrid::read_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, "SNGRID01", 8) != 0)
        throw invalid_parameter("FieldGrid::read_binary: bad magic");
    FieldGrid g;
    g.dim_ = get_raw<std::int32_t>(is);
    g.spacing_ = get_raw<double>(is);
    g.nodes_per_cell_axis_ = get_raw<std::int64_t>(is);
    g.window_lo_.resize(g.dim_);
    g.window_hi_.resize(g.dim_);
    g.extents_.resize(g.dim_);
    for (int i = 0; i < g.dim_; ++i) {
        g.window_lo_[i] = get_raw<std::int32_t>(is);
        g.window_hi_[i] = get_raw<std::int32_t>(is);
        g.extents_[i] = get_raw<std::int64_t>(is);
    }
    const bool has_grad = get_raw<std::uint8_t>(is) != 0;
    const std::int64_t n = get_raw<std::int64_t>(is);
    g.values_.resize(n);
    is.read(reinterpret_cast<char*>(g.values_.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (has_grad) {
        g.gradients_.resize(n * g.dim_);
        is.read(reinterpret_cast<char*>(g.gradients_.data()),
                static_cast<std::streamsize>(g.gradients_.size() * sizeof(double)));
    }
    if (!is) throw invalid_parameter("FieldGrid::read_binary: truncated stream");
    return g;
}

void FieldGrid::write_csv(std::ostream& os) const {
    for (int i = 0; i < dim_; ++i) os << "x" << (i + 1) << ",";
    os << "value\r\n";
    std::vector<double> y;
    char buf[64];
    for (std::int64_t flat = 0; flat < node_count(); ++flat) {
        node_coords(flat, y);
        for (int i = 0; i < dim_; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", y[i]);
            os << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", values_[flat]);
        os << buf << "\r\n";
    }
}

}  // namespace sngeo
