#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"
#include "sysrate/linear_system.hpp"

using namespace sysrate;

namespace {

LinearSystemModel scalar(double a, double sigma2) { return LinearSystemModel::constant(Matrix{{a}}, Matrix{{sigma2}}); }

// Composite Simpson rule, used as an independent quadrature.
template <typename F>
double simpson(F f, double lo, double hi, int panels) {
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(LinearSystemModel::constant(Matrix::identity(2), Matrix{{1.0, 0.0}, {0.0, -1.0}}), InputError);
    CHECK_THROWS_AS(LinearSystemModel::constant(Matrix::identity(2), Matrix{{1.0, 0.3}, {0.0, 1.0}}), InputError);
    CHECK_THROWS_AS(LinearSystemModel::constant(Matrix::identity(2), Matrix::identity(3)), StructuralError);
    CHECK_THROWS_AS(LinearSystemModel::constant(Matrix(2, 3), Matrix::identity(2)), StructuralError);
    const auto tv = LinearSystemModel::time_varying(2, [](double) { return Matrix::identity(2); }, Matrix::identity(2));
    CHECK_FALSE(tv.is_constant());
    CHECK_THROWS_AS(tv.drift(), InputError);
}

TEST_CASE("state_transition") {
    const auto m = LinearSystemModel::constant(Matrix{{-1.0, 0.0}, {0.0, -2.0}}, Matrix::identity(2));
    CHECK(state_transition(m, 3.0, 0.0) == Matrix::identity(2));
    const Matrix phi = state_transition(m, 0.0, 1.0);
    CHECK(phi(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(phi(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(state_transition(m, 0.0, -0.1), InputError);

    // Scalar-commuting drift a(τ)·I: Φ = exp(∫a)·I.
    auto a = [](double tau) { return -1.0 + 0.5 * std::sin(tau); };
    const auto tv = LinearSystemModel::time_varying(
        2, [a](double tau) { return Matrix::identity(2) * a(tau); }, Matrix::identity(2));
    for (double t : {0.0, 0.7, 2.0}) {
        for (double dt : {0.1, 1.0, 3.0}) {
            const double integral = simpson(a, t, t + dt, 2000);
            const Matrix got = state_transition(tv, t, dt);
            CHECK(std::abs(got(0, 0) - std::exp(integral)) <= 1e-8);
            CHECK(std::abs(got(1, 1) - std::exp(integral)) <= 1e-8);
            CHECK(std::abs(got(0, 1)) <= 1e-12);
        }
    }
}

TEST_CASE("increment covariance closed forms") {
    const Matrix noise{{2.0, 0.5}, {0.5, 1.0}};
    const auto brownian = LinearSystemModel::constant(Matrix(2, 2), noise);
    const auto inc = increment_distribution(brownian, Vector{1.0, -1.0}, 0.0, 0.7);
    CHECK(max_abs_diff(inc.covariance, noise * 0.7) <= 1e-15);
    CHECK(inc.mean == Vector{0.0, 0.0});

    const double expect = (1.0 - std::exp(-2.0)) / 2.0;
    CHECK(std::abs(noise_gramian(scalar(-1.0, 1.0), 0.0, 1.0)(0, 0) - expect) <= 1e-12);
    for (double a : {-3.0, -0.2, 0.4}) {
        for (double dt : {0.01, 0.5, 4.0}) {
            const double want = (1.0 - std::exp(2.0 * a * dt)) / (-2.0 * a);
            CHECK(noise_gramian(scalar(a, 1.0), 0.0, dt)(0, 0) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(noise_gramian(scalar(-1.0, 1.0), 0.0, 0.0), InputError);
    CHECK_THROWS_AS(increment_distribution(scalar(-1.0, 1.0), Vector{1.0, 2.0}, 0.0, 1.0), StructuralError);
}

TEST_CASE("increment mean is (Phi - I) x") {
    const Matrix a{{-0.5, 1.0}, {-1.0, -0.5}};
    const auto m = LinearSystemModel::constant(a, Matrix::identity(2));
    const Vector x{0.3, -2.0};
    const auto inc = increment_distribution(m, x, 0.0, 0.8);
    const Matrix phi = oracle::taylor_exp(a * 0.8) - Matrix::identity(2);
    const Vector want = phi * x;
    CHECK(std::abs(inc.mean[0] - want[0]) <= 1e-13);
    CHECK(std::abs(inc.mean[1] - want[1]) <= 1e-13);
    const auto later = increment_distribution(m, x, 17.0, 0.8);
    CHECK(max_abs_diff(later.covariance, inc.covariance) <= 1e-9);
}

TEST_CASE("Van Loan Gramian matches trapezoid quadrature") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s = oracle::random_hurwitz(3, gen);
        const Matrix noise = oracle::random_psd(3, gen);
        const auto m = LinearSystemModel::constant(s.a, noise);
        const double dt = 0.5 + 0.4 * trial;
        const Matrix w = noise_gramian(m, 0.0, dt);
        const Matrix q = oracle::gramian_trapezoid(s.a, noise, dt, 20000);
        CHECK(max_abs_diff(w, q) <= 1e-7);
    }
}

TEST_CASE("time-varying integration reproduces the constant case") {
    const Matrix a{{-0.45, 1.0}, {-1.0, -0.45}};
    const Matrix noise{{1.0, 0.2}, {0.2, 0.5}};
    const auto lti = LinearSystemModel::constant(a, noise);
    const auto tv = LinearSystemModel::time_varying(2, [a](double) { return a; }, noise);
    for (double dt : {0.05, 1.0, 5.0}) {
        CHECK(max_abs_diff(noise_gramian(tv, 0.0, dt), noise_gramian(lti, 0.0, dt)) <= 1e-8);
        CHECK(max_abs_diff(state_transition(tv, 0.0, dt), state_transition(lti, 0.0, dt)) <= 1e-8);
    }
}

TEST_CASE("Gramian semigroup, Loewner monotonicity and the Lyapunov limit") {
    std::mt19937_64 gen(32);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::normal_distribution<double> nd;
        Matrix a(n, n);
        for (double& v : a.data()) v = 0.6 * nd(gen);  // not necessarily stable
        const Matrix noise = oracle::random_psd(n, gen, trial % 3 ? 0.05 : 0.0);
        const auto m = LinearSystemModel::constant(a, noise);
        const double s = 0.3;
        const double t = 0.9;
        const Matrix phi_t = state_transition(m, 0.0, t);
        const Matrix lhs = noise_gramian(m, 0.0, s + t);
        const Matrix rhs = phi_t * noise_gramian(m, 0.0, s) * phi_t.transpose() + noise_gramian(m, 0.0, t);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-8 * std::max(1.0, lhs.max_abs()));

        const double t1 = 0.4;
        const double t2 = 1.7;
        const Matrix phi = state_transition(m, 0.0, t2 - t1);
        const Matrix gap = noise_gramian(m, 0.0, t2) - phi * noise_gramian(m, 0.0, t1) * phi.transpose();
        CHECK(sym_eig(gap).values.back() >= -1e-9);
        CHECK(sym_eig(noise_gramian(m, 0.0, t2)).values.back() >= -1e-9);
    }
    for (int trial = 0; trial < 8; ++trial) {
        const auto s = oracle::random_hurwitz(1 + trial % 5, gen);
        const Matrix noise = oracle::random_psd(s.a.rows(), gen);
        const Matrix w_inf = lyapunov_solve(s.a, noise);
        const Matrix w = noise_gramian(LinearSystemModel::constant(s.a, noise), 0.0, 50.0 / std::abs(s.slowest_real_part));
        CHECK(max_abs_diff(w, w_inf) <= 1e-6 * w_inf.max_abs());
    }
}

TEST_CASE("gramian_derivative_residual") {
    const auto brownian = LinearSystemModel::constant(Matrix(2, 2), Matrix::identity(2));
    for (double r : gramian_derivative_residual(brownian, Vector{0.1, 1.0, 10.0})) CHECK(r <= 1e-8);

    const Matrix a{{-1.0, 1.0}, {0.0, -2.0}};
    const auto stable = LinearSystemModel::constant(a, Matrix::identity(2));
    for (double r : gramian_derivative_residual(stable, Vector{30.0, 60.0})) CHECK(r <= 1e-6);

    const Vector grid{0.5, 1.0, 2.0};
    const Vector coarse = gramian_derivative_residual(stable, grid, 0.02);
    const Vector fine = gramian_derivative_residual(stable, grid, 0.01);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ratio = coarse[i] / fine[i];
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
    CHECK_THROWS_AS(gramian_derivative_residual(stable, Vector{0.01}, 0.02), InputError);
}

TEST_CASE("sample_paths determinism and zero noise") {
    const Matrix a{{-0.45, 1.0}, {-1.0, -0.45}};
    const auto quiet = LinearSystemModel::constant(a, Matrix(2, 2));
    const Vector x0{1.0, 1.0};
    const auto d = sample_paths(quiet, x0, 0.1, 20, 3, 7);
    const Matrix phi = mat_exp(a, 0.1);
    Vector x = x0;
    for (std::size_t k = 0; k <= 20; ++k) {
        for (std::size_t trial = 0; trial < 3; ++trial) {
            CHECK(std::abs(d.trials[trial][k][0] - x[0]) <= 1e-14);
            CHECK(std::abs(d.trials[trial][k][1] - x[1]) <= 1e-14);
        }
        x = phi * x;
    }

    const auto noisy = LinearSystemModel::constant(a, Matrix::identity(2));
    const auto first = sample_paths(noisy, x0, 0.1, 30, 4, 99);
    const auto second = sample_paths(noisy, x0, 0.1, 30, 4, 99);
    CHECK(first.trials == second.trials);
    const auto other = sample_paths(noisy, x0, 0.1, 30, 4, 100);
    CHECK(first.trials != other.trials);
    CHECK(first.trials[0] != first.trials[1]);

    CHECK_THROWS_AS(sample_paths(noisy, x0, 0.1, 0, 4, 1), InputError);
    CHECK_THROWS_AS(sample_paths(noisy, x0, 0.1, 3, 0, 1), InputError);
    CHECK_THROWS_AS(sample_paths(noisy, x0, -0.1, 3, 1, 1), InputError);
    CHECK_THROWS_AS(sample_paths(noisy, Vector{1.0}, 0.1, 3, 1, 1), StructuralError);
}

TEST_CASE("sample_paths increments follow N((Phi - I)x, W)") {
    // Brownian: covariance of unit increments within the chi-square bound.
    const auto bm = LinearSystemModel::constant(Matrix(2, 2), Matrix::identity(2));
    const std::size_t trials = 2000;
    const auto d = sample_paths(bm, Vector{0.0, 0.0}, 1.0, 1, trials, 2024);
    Matrix cov(2, 2);
    for (const auto& tr : d.trials)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) cov(a, b) += tr[1][a] * tr[1][b] / static_cast<double>(trials);
    const double bound = 3.0 * std::sqrt(2.0 / static_cast<double>(trials));
    CHECK(std::abs(cov(0, 0) - 1.0) <= bound);
    CHECK(std::abs(cov(1, 1) - 1.0) <= bound);
    CHECK(std::abs(cov(0, 1)) <= bound);

    // Stable drift from a fixed state: first-step mean and covariance.
    const Matrix a{{-0.45, 1.0}, {-1.0, -0.45}};
    const Matrix noise{{0.5, 0.1}, {0.1, 0.3}};
    const auto m = LinearSystemModel::constant(a, noise);
    const Vector x0{2.0, -1.0};
    const auto law = increment_distribution(m, x0, 0.0, 0.5);
    const auto s = sample_paths(m, x0, 0.5, 1, 4000, 5);
    Vector mean(2, 0.0);
    for (const auto& tr : s.trials) axpy(1.0 / 4000.0, sub(tr[1], tr[0]), mean);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(mean[i] - law.mean[i]) <= 4.0 * std::sqrt(law.covariance(i, i) / 4000.0));
    Matrix c(2, 2);
    for (const auto& tr : s.trials) {
        const Vector dx = sub(sub(tr[1], tr[0]), mean);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) c(i, j) += dx[i] * dx[j] / 3999.0;
    }
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double w = law.covariance(i, j);
            const double se = std::sqrt((law.covariance(i, i) * law.covariance(j, j) + w * w) / 3999.0);
            CHECK(std::abs(c(i, j) - w) <= 4.0 * se);
        }
    }
}
