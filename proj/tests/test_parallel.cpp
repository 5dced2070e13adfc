#include <doctest.h>

#include <omp.h>

#include "sysrate/complexity.hpp"
#include "sysrate/emulation.hpp"
#include "sysrate/errors.hpp"
#include "sysrate/presets.hpp"

using namespace sysrate;

// The machine may have a single core; oversubscribe so the parallel path
// really interleaves.
struct ThreadGuard {
    int saved = omp_get_max_threads();
    ThreadGuard() { omp_set_num_threads(4); }
    ~ThreadGuard() { omp_set_num_threads(saved); }
};

TEST_CASE("sample_paths: parallel equals serial") {
    ThreadGuard guard;
    const auto m = preset_model("stable");
    const auto serial = sample_paths(m, Vector{1.0, 1.0}, 0.05, 40, 37, 11, Execution::serial);
    const auto parallel = sample_paths(m, Vector{1.0, 1.0}, 0.05, 40, 37, 11, Execution::parallel);
    CHECK(serial.trials == parallel.trials);
    CHECK(serial.dt == parallel.dt);
}

TEST_CASE("rate_curve: parallel equals serial") {
    ThreadGuard guard;
    for (const char* name : {"stable", "marginal", "unstable"}) {
        const auto m = preset_model(name);
        const auto grid = logspace(1e-3, 1e2, 83);
        const auto a = rate_curve(m, 0.01, grid, RateAxis::by_fs, Execution::serial);
        const auto b = rate_curve(m, 0.01, grid, RateAxis::by_fs, Execution::parallel);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            CHECK(a.samples[i].dt == b.samples[i].dt);
            CHECK(a.samples[i].rate_bits == b.samples[i].rate_bits);
        }
        CHECK(a.asymptote_bits == b.asymptote_bits);
    }
}

TEST_CASE("rate_curve: errors inside the parallel loop propagate") {
    ThreadGuard guard;
    const auto m = preset_model("stable");
    const std::vector<double> grid{0.1, 0.2};
    CHECK_THROWS_AS(rate_curve(m, -1.0, grid, RateAxis::by_dt, Execution::parallel), InputError);
}

TEST_CASE("build_codebook and emulation: parallel equals serial") {
    ThreadGuard guard;
    const auto& p = find_preset("stable");
    const auto m = LinearSystemModel::constant(p.drift, Matrix::identity(2) * 0.01);
    const auto data = sample_paths(m, p.x0, 0.01, 60, 20, 5);
    const auto fam = grid_family();
    const auto a = build_codebook(data, fam, Execution::serial);
    const auto b = build_codebook(data, fam, Execution::parallel);
    CHECK(a.p == b.p);
    CHECK(a.z == b.z);
    CHECK(a.x0 == b.x0);
    CHECK(a.feasible == b.feasible);

    EmulationOptions serial;
    serial.seed = 3;
    serial.exec = Execution::serial;
    EmulationOptions parallel = serial;
    parallel.exec = Execution::parallel;
    CHECK(emulate(data, fam, serial).trajectory.trials == emulate(data, fam, parallel).trajectory.trials);
}

TEST_CASE("emulate_paths: parallel equals serial and path 0 matches emulate") {
    ThreadGuard guard;
    const auto m = LinearSystemModel::constant(Matrix{{-0.5, 1.0}, {-1.0, -0.5}}, Matrix::identity(2) * 0.01);
    const auto data = sample_paths(m, Vector{1.0, 0.0}, 0.02, 30, 10, 8);
    const auto fam = grid_family();
    const auto codes = build_codebook(data, fam);
    EmulationOptions opts;
    opts.seed = 17;
    opts.exec = Execution::serial;
    const auto a = emulate_paths(codes, fam, opts, 9);
    opts.exec = Execution::parallel;
    const auto b = emulate_paths(codes, fam, opts, 9);
    CHECK(a.trials == b.trials);
    CHECK(a.trials[0] == emulate(data, fam, opts).trajectory.trials[0]);
    CHECK(a.trials[0] != a.trials[1]);
    CHECK_THROWS_AS(emulate_paths(codes, fam, opts, 0), InputError);
}
