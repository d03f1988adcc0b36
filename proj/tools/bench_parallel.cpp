// Compares the OpenMP kernels against their serial reference implementations:
// field-grid construction and a replicated functional batch. Also checks that
// both produce identical bits.

#include <omp.h>

#include <cstdio>
#include <cstring>

#include "sngeo/estimators.hpp"

using namespace sngeo;

namespace {

double time_of(void (*fn)(const void*), const void* arg, int repeats) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double t0 = omp_get_wtime();
        fn(arg);
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

struct GridArgs {
    const MarkedConfiguration* config;
    const RadialKernel* kernel;
    const LatticeWindow* window;
    double spacing;
};

void grid_parallel(const void* p) {
    const auto* a = static_cast<const GridArgs*>(p);
    volatile double sink =
        build_grid(*a->config, *a->kernel, *a->window, a->spacing).values()[0];
    (void)sink;
}

void grid_serial(const void* p) {
    const auto* a = static_cast<const GridArgs*>(p);
    volatile double sink =
        build_grid_serial(*a->config, *a->kernel, *a->window, a->spacing).values()[0];
    (void)sink;
}

struct BatchArgs {
    const FunctionalSpec* spec;
    const FieldSpec* field;
    const LatticeWindow* window;
    std::int64_t n;
};

void batch_parallel(const void* p) {
    const auto* a = static_cast<const BatchArgs*>(p);
    volatile double sink = replicate(*a->spec, *a->field, *a->window, a->n, 7).values[0];
    (void)sink;
}

void batch_serial(const void* p) {
    const auto* a = static_cast<const BatchArgs*>(p);
    volatile double sink = replicate_serial(*a->spec, *a->field, *a->window, a->n, 7).values[0];
    (void)sink;
}

}  // namespace

int main() {
    std::printf("threads: %d\n\n", omp_get_max_threads());

    FieldSpec field;
    field.radial = RadialKernel::power(0.5, 23.0, 1.0, 2);
    field.marks = MarkDistribution::radial_kernel_tag();

    const LatticeWindow window = LatticeWindow::cube(24, 2);
    const MarkedConfiguration config =
        sample_poisson(Region::padded_fill(window, field.reach()), field.marks, SeedStream{1, 0});

    GridArgs ga{&config, &*field.radial, &window, 1.0 / 32.0};
    const FieldGrid gp = build_grid(*ga.config, *ga.kernel, *ga.window, ga.spacing);
    const FieldGrid gs = build_grid_serial(*ga.config, *ga.kernel, *ga.window, ga.spacing);
    const bool grid_match =
        gp.node_count() == gs.node_count() &&
        std::memcmp(gp.values().data(), gs.values().data(),
                    gp.node_count() * sizeof(double)) == 0;

    const double tg_par = time_of(grid_parallel, &ga, 3);
    const double tg_ser = time_of(grid_serial, &ga, 3);
    std::printf("field grid  (Q24, h=1/32, %lld nodes)\n",
                static_cast<long long>(gp.node_count()));
    std::printf("  serial reference : %8.3f s\n", tg_ser);
    std::printf("  openmp blocked   : %8.3f s   speedup %.2fx   identical: %s\n\n", tg_par,
                tg_ser / tg_par, grid_match ? "yes" : "NO");

    FunctionalSpec spec;
    spec.kind = FunctionalKind::excursion_volume;
    spec.level = 1.0;
    spec.grid_spacing = 1.0 / 8.0;
    BatchArgs ba{&spec, &field, &window, 64};
    const SampleBatch bp = replicate(spec, field, window, ba.n, 7);
    const SampleBatch bs = replicate_serial(spec, field, window, ba.n, 7);
    const bool batch_match = bp.values == bs.values;

    const double tb_par = time_of(batch_parallel, &ba, 3);
    const double tb_ser = time_of(batch_serial, &ba, 3);
    std::printf("replicate batch (excursion volume, Q24, n=%lld)\n",
                static_cast<long long>(ba.n));
    std::printf("  serial reference : %8.3f s\n", tb_ser);
    std::printf("  openmp           : %8.3f s   speedup %.2fx   identical: %s\n", tb_par,
                tb_ser / tb_par, batch_match ? "yes" : "NO");

    return grid_match && batch_match ? 0 : 1;
}
