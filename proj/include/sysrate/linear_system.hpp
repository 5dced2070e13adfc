#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "sysrate/dataset.hpp"
#include "sysrate/execution.hpp"
#include "sysrate/matrix.hpp"

namespace sysrate {

struct ConstantDrift {
    Matrix a;
};

struct TimeVaryingDrift {
    std::function<Matrix(double)> a;
};

/// dx = A(t) x dt + dw, with w a Brownian motion of intensity N.
class LinearSystemModel {
public:
    static LinearSystemModel constant(Matrix a, Matrix noise_intensity);
    static LinearSystemModel time_varying(std::size_t n, std::function<Matrix(double)> a, Matrix noise_intensity);

    std::size_t dimension() const noexcept { return noise_.rows(); }
    bool is_constant() const noexcept { return std::holds_alternative<ConstantDrift>(drift_); }

    /// Constant drift matrix; throws InputError for time-varying models.
    const Matrix& drift() const;
    Matrix drift_at(double t) const;
    const Matrix& noise_intensity() const noexcept { return noise_; }

private:
    LinearSystemModel(std::variant<ConstantDrift, TimeVaryingDrift> drift, Matrix noise);

    std::variant<ConstantDrift, TimeVaryingDrift> drift_;
    Matrix noise_;
};

/// Law of ΔX(t) = X(t+dt) - X(t) given X(t) = x_t.
struct IncrementDistribution {
    Vector mean;
    Matrix covariance;
    double t = 0.0;
    double dt = 0.0;
};

/// Φ(t+dt, t).
Matrix state_transition(const LinearSystemModel& model, double t, double dt);

/// W_t(dt) = ∫ Φ(t+dt, τ) N Φ(t+dt, τ)ᵀ dτ over [t, t+dt].
Matrix noise_gramian(const LinearSystemModel& model, double t, double dt);

IncrementDistribution increment_distribution(const LinearSystemModel& model, std::span<const double> x_t, double t,
                                             double dt);

/// Max-norm of (W(dt+h) - W(dt-h))/(2h) - (A W + W Aᵀ + N) for each dt in the
/// grid. When step <= 0 a step of 1e-3·dt is used.
Vector gramian_derivative_residual(const LinearSystemModel& model, std::span<const double> dt_grid,
                                   double step = 0.0);

/// Exact discretization x(k+1) = Φ x(k) + ξ(k), ξ ~ N(0, W(dt)); draws keyed
/// by (seed, trial, step) so the result does not depend on `exec`.
TrajectoryDataset sample_paths(const LinearSystemModel& model, std::span<const double> x0, double dt,
                               std::size_t steps, std::size_t trials, std::uint64_t seed,
                               Execution exec = Execution::parallel);

}  // namespace sysrate
