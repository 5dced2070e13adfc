// Serial vs OpenMP timings of the trial-parallel kernels.
//
//   bench_kernels [repeats]
//
// Each kernel runs `repeats` times per mode (default 3); the best wall time
// is reported together with a check that both modes agree bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "sysrate/complexity.hpp"
#include "sysrate/emulation.hpp"
#include "sysrate/execution.hpp"
#include "sysrate/presets.hpp"

using namespace sysrate;

namespace {

template <typename F>
double best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name.c_str(), serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads=%d repeats=%d\n", max_threads(), repeats);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial[s]", "omp[s]", "speedup");

    const auto stable = preset_model("stable");
    {
        TrajectoryDataset a, b;
        const double ts = best_of(repeats, [&] { a = sample_paths(stable, Vector{1.0, 1.0}, 0.01, 300, 2000, 1, Execution::serial); });
        const double tp = best_of(repeats, [&] { b = sample_paths(stable, Vector{1.0, 1.0}, 0.01, 300, 2000, 1, Execution::parallel); });
        row("sample_paths L=2000 T=300", ts, tp, a.trials == b.trials);
    }
    {
        const auto grid = logspace(1e-3, 1e3, 2000);
        RateCurve a, b;
        const double ts = best_of(repeats, [&] { a = rate_curve(stable, 0.01, grid, RateAxis::by_dt, Execution::serial); });
        const double tp = best_of(repeats, [&] { b = rate_curve(stable, 0.01, grid, RateAxis::by_dt, Execution::parallel); });
        bool same = a.samples.size() == b.samples.size();
        for (std::size_t i = 0; same && i < a.samples.size(); ++i) same = a.samples[i].rate_bits == b.samples[i].rate_bits;
        row("rate_curve 2000 points", ts, tp, same);
    }
    const auto& p = find_preset("stable");
    const auto noisy = LinearSystemModel::constant(p.drift, Matrix::identity(2) * 0.01);
    const auto data = sample_paths(noisy, p.x0, 0.01, 300, 200, 2);
    const auto family = grid_family();
    {
        EmulationCodebook a, b;
        const double ts = best_of(repeats, [&] { a = build_codebook(data, family, Execution::serial); });
        const double tp = best_of(repeats, [&] { b = build_codebook(data, family, Execution::parallel); });
        row("build_codebook L=200 K=24", ts, tp, a.p == b.p && a.z == b.z);
    }
    {
        const auto codes = build_codebook(data, family);
        EmulationOptions opts;
        opts.seed = 3;
        TrajectoryDataset a, b;
        opts.exec = Execution::serial;
        const double ts = best_of(repeats, [&] { a = emulate_paths(codes, family, opts, 1000); });
        opts.exec = Execution::parallel;
        const double tp = best_of(repeats, [&] { b = emulate_paths(codes, family, opts, 1000); });
        row("emulate_paths M=1000", ts, tp, a.trials == b.trials);
    }
    return 0;
}
