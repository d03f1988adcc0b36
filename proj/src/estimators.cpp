#include "sngeo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sngeo {

namespace {

double count_in_window(const MarkedConfiguration& config, const LatticeWindow& window) {
    double c = 0.0;
    for (std::int64_t i = 0; i < config.size(); ++i)
        if (window.fill_contains(config.point(i))) c += 1.0;
    return c;
}

double nn_phi_score(const MarkedConfiguration& recentred, int k) {
    // phi(N_k(0; zeta)) with phi(A) = 0.5 * sum of |y|; 0 when too few points.
    if (recentred.size() <= k) return 0.0;
    // The recentred configuration contains the origin point itself.
    std::int64_t self = -1;
    for (std::int64_t i = 0; i < recentred.size(); ++i) {
        auto p = recentred.point(i);
        bool zero = true;
        for (double v : p) zero = zero && v == 0.0;
        if (zero) {
            self = i;
            break;
        }
    }
    if (self < 0) throw invalid_parameter("nn_phi score: recentred point not found");
    NeighborStructure ns = nn_structure(recentred, k);
    double s = 0.0;
    for (std::int32_t j : ns.symmetric[self]) {
        auto y = recentred.point(j);
        double d2 = 0.0;
        for (double v : y) d2 += v * v;
        s += std::sqrt(d2);
    }
    return 0.5 * s;
}

}  // namespace

Region sampling_region(const FunctionalSpec& spec, const FieldSpec& field,
                       const LatticeWindow& window) {
    if (spec.input == InputMode::finite) return Region::window_fill(window);
    return Region::padded_fill(window, field.reach());
}

double evaluate_functional(const FunctionalSpec& spec, const FieldSpec& field,
                           const LatticeWindow& window, const MarkedConfiguration& config) {
    switch (spec.kind) {
        case FunctionalKind::excursion_volume: {
            FieldGrid grid = field.is_token()
                                 ? build_grid(config, TokenKernel{}, window, spec.grid_spacing)
                                 : build_grid(config, *field.radial, window, spec.grid_spacing);
            return excursion_volume(grid, spec.level);
        }
        case FunctionalKind::fixed_level_perimeter: {
            if (field.is_token()) {
                JumpStructure js = build_jump_structure(config, window);
                return fixed_level_perimeter_token(js, spec.level);
            }
            FieldGrid grid = build_grid(config, *field.radial, window, spec.grid_spacing);
            return fixed_level_perimeter_grid(grid, spec.level);
        }
        case FunctionalKind::total_curvature: {
            if (!field.is_token())
                throw invalid_parameter("total curvature requires a token field");
            JumpStructure js = build_jump_structure(config, window);
            return total_curvature(js, spec.level).total;
        }
        case FunctionalKind::weighted_perimeter: {
            const TestFunction h = TestFunction::bump(spec.test_center, spec.test_width);
            if (field.is_token()) {
                JumpStructure js = build_jump_structure(config, window);
                return weighted_perimeter_jump(js, h, spec.quad_order);
            }
            return weighted_perimeter_cont(config, *field.radial, window, h,
                                           spec.grid_spacing);
        }
        case FunctionalKind::nn_length:
            return nn_length_functional(config, window, spec.k);
        case FunctionalKind::score_sum:
            switch (spec.score) {
                case ScoreKind::zero: return 0.0;
                case ScoreKind::count: return count_in_window(config, window);
                case ScoreKind::nn_phi:
                    return score_sum(config, window,
                                     [&](const Mark&, const MarkedConfiguration& z) {
                                         return nn_phi_score(z, spec.k);
                                     });
            }
    }
    throw invalid_parameter("evaluate_functional: unknown functional kind");
}

namespace {

constexpr int kMaxResampleAttempts = 100;

SampleBatch run_batch(const FunctionalSpec& spec, const FieldSpec& field,
                      const LatticeWindow& window, std::int64_t n, std::uint64_t master_seed,
                      std::uint64_t context, double failure_budget, bool parallel) {
    if (n < 2) throw invalid_parameter("replicate: n must be >= 2");
    spec.validate();
    const Region region = sampling_region(spec, field, window);

    SampleBatch batch;
    batch.master_seed = master_seed;
    batch.context = context;
    batch.values.assign(n, 0.0);
    std::vector<std::uint8_t> aborted(n, 0);

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::int64_t r = 0; r < n; ++r) {
        const std::uint64_t stream = (context << 32) + static_cast<std::uint64_t>(r);
        bool done = false;
        for (int attempt = 0; attempt < kMaxResampleAttempts && !done; ++attempt) {
            const SeedStream seed = SeedStream{master_seed, stream}.retry(attempt);
            try {
                MarkedConfiguration config = sample_poisson(region, field.marks, seed);
                batch.values[r] = evaluate_functional(spec, field, window, config);
                done = true;
            } catch (const degenerate_configuration&) {
                continue;  // resample on the retry substream
            } catch (const std::exception&) {
                break;
            }
        }
        if (!done) aborted[r] = 1;
    }

    std::vector<double> kept;
    kept.reserve(n);
    for (std::int64_t r = 0; r < n; ++r) {
        if (aborted[r])
            batch.aborted_streams.push_back((context << 32) + static_cast<std::uint64_t>(r));
        else
            kept.push_back(batch.values[r]);
    }
    if (static_cast<double>(batch.aborted_streams.size()) > failure_budget * n)
        throw replicate_failure("replicate: abort budget exceeded (" +
                                std::to_string(batch.aborted_streams.size()) + " of " +
                                std::to_string(n) + ")");
    batch.values = std::move(kept);
    return batch;
}

}  // namespace

SampleBatch replicate(const FunctionalSpec& spec, const FieldSpec& field,
                      const LatticeWindow& window, std::int64_t n, std::uint64_t master_seed,
                      std::uint64_t context, double failure_budget) {
    return run_batch(spec, field, window, n, master_seed, context, failure_budget, true);
}

SampleBatch replicate_serial(const FunctionalSpec& spec, const FieldSpec& field,
                             const LatticeWindow& window, std::int64_t n,
                             std::uint64_t master_seed, std::uint64_t context,
                             double failure_budget) {
    return run_batch(spec, field, window, n, master_seed, context, failure_budget, false);
}

double batched_se(std::span<const double> values, double (*statistic)(std::span<const double>)) {
    const std::int64_t n = static_cast<std::int64_t>(values.size());
    const std::int64_t per = n / kBatchCount;
    if (per < 2) throw invalid_parameter("batched_se: need at least 2 samples per batch");
    std::vector<double> stats(kBatchCount);
    for (int b = 0; b < kBatchCount; ++b)
        stats[b] = statistic(values.subspan(b * per, per));
    const double v = sample_variance(stats);
    return std::sqrt(v / kBatchCount);
}

std::vector<VarianceRow> variance_scan(const FunctionalSpec& spec, const FieldSpec& field,
                                       std::span<const double> sides, std::int64_t n_per_size,
                                       std::uint64_t master_seed) {
    if (n_per_size < 500) throw invalid_parameter("variance_scan: n per size must be >= 500");
    for (std::size_t i = 1; i < sides.size(); ++i)
        if (!(sides[i] > sides[i - 1]))
            throw invalid_parameter("variance_scan: sides must be increasing");

    std::vector<VarianceRow> rows;
    for (std::size_t i = 0; i < sides.size(); ++i) {
        const LatticeWindow w = LatticeWindow::cube(sides[i], 2);
        SampleBatch batch =
            replicate(spec, field, w, n_per_size, master_seed, /*context=*/10 + i);
        VarianceRow row;
        row.side = sides[i];
        row.cells = static_cast<double>(w.cell_count());
        row.variance = sample_variance(batch.values);
        row.var_per_cell = row.variance / row.cells;
        row.se_var_per_cell = batched_se(batch.values, [](std::span<const double> v) {
                                  return sample_variance(v);
                              }) /
                              row.cells;
        row.replicates = static_cast<std::int64_t>(batch.values.size());
        rows.push_back(row);
    }
    return rows;
}

Sigma0Estimate sigma0_cov_series(const FunctionalSpec& spec, const FieldSpec& field, int K,
                                 std::int64_t n, std::uint64_t master_seed,
                                 std::uint64_t context) {
    if (K < 1) throw invalid_parameter("sigma0_cov_series: K must be >= 1");
    if (n < kBatchCount * 2) throw invalid_parameter("sigma0_cov_series: n too small");
    spec.validate();
    const int d = 2;
    const LatticeWindow eval_window = LatticeWindow::cube(2 * K + 1, d);
    const double half = (2.0 * K + 2.0) / 2.0 + field.reach();
    const Region region = Region::box(std::vector<double>(d, -half), std::vector<double>(d, half));

    const std::int64_t m = eval_window.cell_count();  // (2K+1)^d shifts
    std::vector<double> F(n * m, 0.0);
    std::vector<std::uint8_t> failed(n, 0);

    // Fast path: excursion volume reads per-cell node counts off one shared
    // grid; everything else evaluates F_0 on the translated configuration per
    // lattice shift.
    const bool fast_volume = spec.kind == FunctionalKind::excursion_volume;
    const bool fast_count =
        spec.kind == FunctionalKind::score_sum && spec.score == ScoreKind::count;

#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t r = 0; r < n; ++r) {
        const std::uint64_t stream = (context << 32) + static_cast<std::uint64_t>(r);
        bool ok = false;
        for (int attempt = 0; attempt < kMaxResampleAttempts && !ok; ++attempt) {
            const SeedStream seed = SeedStream{master_seed, stream}.retry(attempt);
            try {
                MarkedConfiguration config = sample_poisson(region, field.marks, seed);
                if (fast_volume) {
                    FieldGrid grid =
                        field.is_token()
                            ? build_grid(config, TokenKernel{}, eval_window, spec.grid_spacing)
                            : build_grid(config, *field.radial, eval_window,
                                         spec.grid_spacing);
                    const std::int64_t mm = grid.nodes_per_cell_axis();
                    const std::int64_t ny = grid.extents()[1];
                    const double cell_vol = spec.grid_spacing * spec.grid_spacing;
                    for (std::int64_t c = 0; c < m; ++c) {
                        auto cell = eval_window.cell(c);
                        const std::int64_t gx0 = (cell[0] - eval_window.lo()[0]) * mm;
                        const std::int64_t gy0 = (cell[1] - eval_window.lo()[1]) * mm;
                        std::int64_t cnt = 0;
                        for (std::int64_t a = 0; a < mm; ++a)
                            for (std::int64_t b = 0; b < mm; ++b)
                                if (grid.values()[(gx0 + a) * ny + gy0 + b] >= spec.level)
                                    ++cnt;
                        F[r * m + c] = cell_vol * static_cast<double>(cnt);
                    }
                } else if (fast_count) {
                    for (std::int64_t i = 0; i < config.size(); ++i) {
                        auto p = config.point(i);
                        const int kx = static_cast<int>(std::floor(p[0] + 0.5));
                        const int ky = static_cast<int>(std::floor(p[1] + 0.5));
                        if (kx < -K || kx > K || ky < -K || ky > K) continue;
                        const std::int64_t c = (kx + K) * (2 * K + 1) + (ky + K);
                        F[r * m + c] += 1.0;
                    }
                } else {
                    const LatticeWindow unit = LatticeWindow::cube(1, d);
                    for (std::int64_t c = 0; c < m; ++c) {
                        auto cell = eval_window.cell(c);
                        const std::vector<double> shift{static_cast<double>(cell[0]),
                                                        static_cast<double>(cell[1])};
                        F[r * m + c] = evaluate_functional(spec, field, unit,
                                                           config.translated(shift));
                    }
                }
                ok = true;
            } catch (const degenerate_configuration&) {
                continue;
            } catch (const std::exception&) {
                break;
            }
        }
        if (!ok) failed[r] = 1;
    }

    // Drop failed replicates (rare); keep batching aligned.
    std::vector<std::int64_t> keep;
    for (std::int64_t r = 0; r < n; ++r)
        if (!failed[r]) keep.push_back(r);
    const std::int64_t nk = static_cast<std::int64_t>(keep.size());
    if (nk < kBatchCount * 2) throw replicate_failure("sigma0_cov_series: too many aborts");

    const std::int64_t center =
        eval_window.cell_count() / 2;  // lexicographic middle of the odd cube = origin cell

    auto series_on = [&](std::span<const std::int64_t> rows, double* tail_abs) {
        const std::int64_t nr = static_cast<std::int64_t>(rows.size());
        std::vector<double> meanv(m, 0.0);
        std::vector<double> column(nr);
        for (std::int64_t c = 0; c < m; ++c) {
            for (std::int64_t i = 0; i < nr; ++i) column[i] = F[rows[i] * m + c];
            meanv[c] = mean(column);
        }
        double sum = 0.0;
        double tail = 0.0;
        std::vector<double> prods(nr);
        for (std::int64_t c = 0; c < m; ++c) {
            for (std::int64_t i = 0; i < nr; ++i) {
                const double a = F[rows[i] * m + center] - meanv[center];
                const double b = F[rows[i] * m + c] - meanv[c];
                prods[i] = a * b;
            }
            const double cov = pairwise_sum(prods) / static_cast<double>(nr - 1);
            sum += cov;
            auto cell = eval_window.cell(c);
            const int linf = std::max(std::abs(cell[0]), std::abs(cell[1]));
            if (linf == K) tail = std::max(tail, std::abs(cov));
        }
        if (tail_abs) *tail_abs = tail;
        return sum;
    };

    Sigma0Estimate est;
    est.method = "cov-series";
    est.truncation = K;
    est.replicates = nk;
    est.raw = series_on(keep, &est.tail_indicator);
    est.floored = std::max(0.0, est.raw);

    // Batched SE.
    const std::int64_t per = nk / kBatchCount;
    if (per >= 2) {
        std::vector<double> stats(kBatchCount);
        for (int b = 0; b < kBatchCount; ++b) {
            std::span<const std::int64_t> rows(keep.data() + b * per, per);
            stats[b] = series_on(rows, nullptr);
        }
        est.se = std::sqrt(sample_variance(stats) / kBatchCount);
    }
    return est;
}

Sigma0Estimate sigma0_volume_integral(const FieldSpec& field, int dim, double u, double R_int,
                                      std::int64_t n, std::uint64_t master_seed,
                                      std::uint64_t context, double radial_step) {
    if (!(R_int > 0.0) || !(radial_step > 0.0))
        throw invalid_parameter("sigma0_volume_integral: bad radii");
    if (n < kBatchCount * 2) throw invalid_parameter("sigma0_volume_integral: n too small");

    const double pad = field.reach();
    const std::int64_t n_radii = static_cast<std::int64_t>(std::round(R_int / radial_step)) + 1;
    std::vector<double> radii(n_radii);
    for (std::int64_t j = 0; j < n_radii; ++j) radii[j] = j * radial_step;

    // Sampling box covering the reach of both evaluation points.
    std::vector<double> lo{-pad, -pad}, hi{R_int + pad, pad};
    if (dim != 2) throw invalid_parameter("sigma0_volume_integral: d = 2 supported");
    const Region region = Region::box(lo, hi);

    // joint[r * n_radii + j] = 1 when f(0) >= u and f(x_j) >= u.
    std::vector<std::uint8_t> joint(n * n_radii, 0);
    std::vector<std::uint8_t> at0(n, 0);

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < n; ++r) {
        const std::uint64_t stream = (context << 32) + static_cast<std::uint64_t>(r);
        const SeedStream seed{master_seed, stream};
        MarkedConfiguration config = sample_poisson(region, field.marks, seed);
        FieldEvaluator ev = field.is_token() ? FieldEvaluator(config, TokenKernel{})
                                             : FieldEvaluator(config, *field.radial);
        const std::array<double, 2> origin{0.0, 0.0};
        const bool base = ev.value(origin) >= u;
        at0[r] = base ? 1 : 0;
        if (!base) continue;  // joint exceedance needs the origin to exceed
        for (std::int64_t j = 0; j < n_radii; ++j) {
            const std::array<double, 2> x{radii[j], 0.0};
            joint[r * n_radii + j] = ev.value(x) >= u ? 1 : 0;
        }
    }

    const double sigma_d = 2.0 * std::numbers::pi;  // d = 2 radial measure

    auto integral_on = [&](std::int64_t lo_r, std::int64_t nr, double* tail) {
        double p0 = 0.0;
        for (std::int64_t i = 0; i < nr; ++i) p0 += at0[lo_r + i];
        p0 /= static_cast<double>(nr);
        std::vector<double> integrand(n_radii);
        for (std::int64_t j = 0; j < n_radii; ++j) {
            double pj = 0.0;
            for (std::int64_t i = 0; i < nr; ++i) pj += joint[(lo_r + i) * n_radii + j];
            pj /= static_cast<double>(nr);
            integrand[j] = pj - p0 * p0;
        }
        if (tail) *tail = integrand[n_radii - 1];
        double total = 0.0;
        for (std::int64_t j = 1; j < n_radii; ++j) {
            const double f0 = integrand[j - 1] * sigma_d * radii[j - 1];
            const double f1 = integrand[j] * sigma_d * radii[j];
            total += 0.5 * (f0 + f1) * radial_step;
        }
        return total;
    };

    Sigma0Estimate est;
    est.method = "volume-integral";
    est.truncation = R_int;
    est.replicates = n;
    double tail = 0.0;
    est.raw = integral_on(0, n, &tail);
    est.floored = std::max(0.0, est.raw);

    const std::int64_t per = n / kBatchCount;
    std::vector<double> stats(kBatchCount), tails(kBatchCount);
    for (int b = 0; b < kBatchCount; ++b) {
        double tb = 0.0;
        stats[b] = integral_on(b * per, per, &tb);
        tails[b] = tb;
    }
    est.se = std::sqrt(sample_variance(stats) / kBatchCount);
    est.tail_indicator = tail;

    // Decay monitor: the tail integrand should be consistent with zero or at
    // least four orders below the center value.
    double p0_all = 0.0;
    for (std::int64_t r = 0; r < n; ++r) p0_all += at0[r];
    p0_all /= static_cast<double>(n);
    const double center_value = p0_all - p0_all * p0_all;
    const double tail_se = std::sqrt(std::max(sample_variance(tails), 0.0) / kBatchCount);
    est.tail_warning =
        std::abs(tail) > std::max(1e-4 * std::abs(center_value), 3.0 * tail_se);
    return est;
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }

double kolmogorov_distance(std::span<const double> values, Standardization how, double mu,
                           double sigma) {
    std::vector<double> z;
    if (how == Standardization::plug_in) {
        if (values.size() < 100)
            throw invalid_parameter("kolmogorov_distance: need n >= 100");
        const std::size_t half = values.size() / 2;
        const auto head = values.first(half);
        const double m = mean(head);
        const double v = sample_variance(head);
        if (!(v > 0.0))
            throw degenerate_sample("kolmogorov_distance: zero variance under plug-in");
        const double s = std::sqrt(v);
        z.reserve(values.size() - half);
        for (std::size_t i = half; i < values.size(); ++i) z.push_back((values[i] - m) / s);
    } else {
        if (values.size() < 100)
            throw invalid_parameter("kolmogorov_distance: need n >= 100");
        if (!(sigma > 0.0)) throw degenerate_sample("kolmogorov_distance: sigma must be > 0");
        z.reserve(values.size());
        for (double v : values) z.push_back((v - mu) / sigma);
    }
    std::sort(z.begin(), z.end());
    const double n = static_cast<double>(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double phi = normal_cdf(z[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - phi);
        d = std::max(d, phi - static_cast<double>(i) / n);
    }
    return d;
}

RateFit rate_fit(std::span<const double> cells, std::span<const double> dk) {
    if (cells.size() != dk.size() || cells.size() < 3)
        throw invalid_parameter("rate_fit: need at least 3 sizes");
    RateFit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!(dk[i] > 0.0)) {
            fit.excluded.push_back(i);
            continue;
        }
        xs.push_back(std::log(cells[i]));
        ys.push_back(std::log(dk[i]));
    }
    if (xs.size() < 3) throw invalid_parameter("rate_fit: fewer than 3 positive d_K values");
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double r2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double res = ys[i] - (fit.intercept + fit.slope * xs[i]);
        r2 += res * res;
    }
    fit.residual_norm = std::sqrt(r2);
    return fit;
}

double sup_interval_mass(std::span<const double> sorted_values, double delta) {
    if (sorted_values.empty()) throw invalid_parameter("sup_interval_mass: empty sample");
    const double width = 2.0 * delta;
    std::size_t best = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < sorted_values.size(); ++i) {
        if (j < i) j = i;
        while (j < sorted_values.size() && sorted_values[j] < sorted_values[i] + width) ++j;
        best = std::max(best, j - i);
    }
    return static_cast<double>(best) / static_cast<double>(sorted_values.size());
}

std::vector<double> origin_field_sample(const FieldSpec& field, int dim, std::int64_t n,
                                        std::uint64_t master_seed, std::uint64_t context) {
    const double pad = field.reach();
    const Region region =
        Region::box(std::vector<double>(dim, -pad), std::vector<double>(dim, pad));
    std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t r = 0; r < n; ++r) {
        const std::uint64_t stream = (context << 32) + static_cast<std::uint64_t>(r);
        MarkedConfiguration config =
            sample_poisson(region, field.marks, SeedStream{master_seed, stream});
        FieldEvaluator ev = field.is_token() ? FieldEvaluator(config, TokenKernel{})
                                             : FieldEvaluator(config, *field.radial);
        const std::vector<double> origin(dim, 0.0);
        out[r] = ev.value(origin);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<AntiConcentrationRow> anti_concentration(const FieldSpec& field, int dim,
                                                     std::span<const double> deltas,
                                                     std::int64_t n, std::uint64_t master_seed,
                                                     std::uint64_t context) {
    if (n < 100000) throw invalid_parameter("anti_concentration: n must be >= 1e5");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw invalid_parameter("anti_concentration: deltas must be decreasing");
    const std::vector<double> sample = origin_field_sample(field, dim, n, master_seed, context);
    std::vector<AntiConcentrationRow> rows;
    for (double d : deltas) rows.push_back({d, sup_interval_mass(sample, d)});
    return rows;
}

}  // namespace sngeo
