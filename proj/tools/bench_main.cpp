#include <omp.h>

#include <cstdio>
#include <functional>

#include "entroplace/entropy.hpp"
#include "entroplace/metrics.hpp"
#include "entroplace/patches.hpp"
#include "entroplace/reference.hpp"
#include "entroplace/synth.hpp"

using namespace entroplace;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    fn(); // warm-up
    const double t0 = omp_get_wtime();
    for (int i = 0; i < reps; ++i) fn();
    return (omp_get_wtime() - t0) / reps;
}

void row(const char* name, double serial_s, double parallel_s) {
    std::printf("%-24s %12.2f %12.2f %9.2fx\n", name, serial_s * 1e3, parallel_s * 1e3,
                serial_s / parallel_s);
}

} // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-24s %12s %12s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    SynthConfig cfg;
    cfg.shape = {96, 96};
    cfg.years = 2;
    const FieldSeries series = generate(cfg);
    const FieldSeries train = series.split(0.8).first;

    const Field snapshot = series.field(0);
    row("boxcar_smooth w=9",
        time_of([&] { reference::boxcar_smooth(snapshot, 9); }, 5),
        time_of([&] { boxcar_smooth(snapshot, 9); }, 5));

    const Ordering ord = spiral_ordering(8);
    row("extract_patches L=8",
        time_of([&] { reference::extract_patches(train, 8, 4, ord); }, 3),
        time_of([&] { extract_patches(train, 8, 4, ord); }, 3));

    row("fit_pixel_gaussian",
        time_of([&] { reference::fit_pixel_gaussian(train); }, 3),
        time_of([&] { fit_pixel_gaussian(train); }, 3));

    EntropyConfig ec;
    ec.patch_size = 6;
    ec.scale = 6;
    ec.bin_stride = 3;
    ec.ensemble = 1;
    ec.bootstrap = false;
    const PatchSet patches = extract_patches(train, 6, 3, spiral_ordering(6));
    const PatchModel model = fit_patch_model(patches, ec);
    row("mc_entropy N=20000",
        time_of([&] { reference::entropy_monte_carlo(model, 0, 6, 20000, 7); }, 3),
        time_of([&] { entropy_monte_carlo(model, 0, 6, 20000, 7); }, 3));

    const FieldSeries test = series.split(0.8).second;
    FieldSeries shifted(test.shape(), test.land());
    for (int t = 0; t < test.times(); ++t) {
        std::vector<double> slab(test.slab(t).begin(), test.slab(t).end());
        for (auto& v : slab) v += 0.25;
        shifted.append(slab, test.stamp(t));
    }
    row("rmse_field",
        time_of([&] { reference::rmse_field(shifted, test); }, 5),
        time_of([&] { rmse_field(shifted, test); }, 5));
    row("bias_field",
        time_of([&] { reference::bias_field(shifted, test); }, 5),
        time_of([&] { bias_field(shifted, test); }, 5));

    return 0;
}
