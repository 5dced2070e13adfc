#include "sysrate/linear_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"
#include "sysrate/rng.hpp"

namespace sysrate {

namespace {

void validate_noise(const Matrix& noise) {
    require_square(noise, "noise intensity");
    require_finite(noise, "noise intensity");
    const double scale = std::max(1.0, noise.max_abs());
    if (!is_symmetric(noise, tol::symmetry * scale)) throw InputError("noise intensity must be symmetric");
    const auto eig = sym_eig(noise);
    if (eig.values.back() < -tol::symmetry * scale) throw InputError("noise intensity must be positive semidefinite");
}

void require_dt(double dt, bool allow_zero) {
    if (!std::isfinite(dt) || dt < 0.0 || (!allow_zero && dt == 0.0))
        throw InputError(std::string("dt must be ") + (allow_zero ? "non-negative" : "positive") + " and finite");
}

struct TransitionAndGramian {
    Matrix phi;
    Matrix gramian;
};

// Van Loan on a base interval short enough that the augmented exponential
// stays well scaled, then W(2τ) = Φ(τ) W(τ) Φ(τ)ᵀ + W(τ) back up to dt.
TransitionAndGramian lti_gramian(const Matrix& a, const Matrix& noise, double dt) {
    const std::size_t n = a.rows();
    int doublings = 0;
    double base = dt;
    const double anorm = a.norm1();
    while (anorm * base > 1.0 && doublings < 60) {
        base *= 0.5;
        ++doublings;
    }
    const Matrix aug = block2x2(-1.0 * a, noise, Matrix(n, n), a.transpose());
    const Matrix f = mat_exp(aug, base);
    const Matrix f12 = sub_block(f, 0, n, n, n);
    const Matrix f22 = sub_block(f, n, n, n, n);
    Matrix phi = f22.transpose();
    Matrix w = symmetrize(phi * f12);
    for (int i = 0; i < doublings; ++i) {
        w = symmetrize(phi * w * phi.transpose() + w);
        phi = phi * phi;
    }
    return {std::move(phi), std::move(w)};
}

// Fixed-step RK4 on dΦ/dτ = A(τ)Φ, dW/dτ = A(τ)W + W A(τ)ᵀ + N.
TransitionAndGramian integrate_time_varying(const LinearSystemModel& model, double t, double dt, bool with_gramian) {
    const std::size_t n = model.dimension();
    const Matrix& noise = model.noise_intensity();
    const double anorm = model.drift_at(t).norm1();
    const auto substeps = static_cast<std::size_t>(std::max(256.0, std::ceil(dt * anorm * 64.0)));
    const double h = dt / static_cast<double>(substeps);

    auto a_at = [&model, n](double tau) {
        Matrix a = model.drift_at(tau);
        if (a.rows() != n || a.cols() != n) throw StructuralError("time-varying drift returned wrong shape");
        require_finite(a, "time-varying drift");
        return a;
    };
    auto dw = [&noise](const Matrix& a, const Matrix& w) { return a * w + w * a.transpose() + noise; };

    Matrix phi = Matrix::identity(n);
    Matrix w(n, n);
    for (std::size_t s = 0; s < substeps; ++s) {
        const double tau = t + static_cast<double>(s) * h;
        const Matrix a0 = a_at(tau);
        const Matrix am = a_at(tau + 0.5 * h);
        const Matrix a1 = a_at(tau + h);

        const Matrix kp1 = a0 * phi;
        const Matrix kp2 = am * (phi + (0.5 * h) * kp1);
        const Matrix kp3 = am * (phi + (0.5 * h) * kp2);
        const Matrix kp4 = a1 * (phi + h * kp3);
        if (with_gramian) {
            const Matrix kw1 = dw(a0, w);
            const Matrix kw2 = dw(am, w + (0.5 * h) * kw1);
            const Matrix kw3 = dw(am, w + (0.5 * h) * kw2);
            const Matrix kw4 = dw(a1, w + h * kw3);
            w += (h / 6.0) * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4);
        }
        phi += (h / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
    }
    return {std::move(phi), symmetrize(w)};
}

}  // namespace

LinearSystemModel::LinearSystemModel(std::variant<ConstantDrift, TimeVaryingDrift> drift, Matrix noise)
    : drift_(std::move(drift)), noise_(std::move(noise)) {}

LinearSystemModel LinearSystemModel::constant(Matrix a, Matrix noise_intensity) {
    require_square(a, "drift");
    require_finite(a, "drift");
    validate_noise(noise_intensity);
    if (a.rows() != noise_intensity.rows()) throw StructuralError("drift and noise intensity sizes differ");
    return LinearSystemModel(ConstantDrift{std::move(a)}, std::move(noise_intensity));
}

LinearSystemModel LinearSystemModel::time_varying(std::size_t n, std::function<Matrix(double)> a,
                                                  Matrix noise_intensity) {
    if (!a) throw InputError("time-varying drift function is empty");
    validate_noise(noise_intensity);
    if (noise_intensity.rows() != n) throw StructuralError("noise intensity size differs from dimension");
    return LinearSystemModel(TimeVaryingDrift{std::move(a)}, std::move(noise_intensity));
}

const Matrix& LinearSystemModel::drift() const {
    if (const auto* c = std::get_if<ConstantDrift>(&drift_)) return c->a;
    throw InputError("model has time-varying drift");
}

Matrix LinearSystemModel::drift_at(double t) const {
    if (const auto* c = std::get_if<ConstantDrift>(&drift_)) return c->a;
    return std::get<TimeVaryingDrift>(drift_).a(t);
}

Matrix state_transition(const LinearSystemModel& model, double t, double dt) {
    require_dt(dt, true);
    if (dt == 0.0) return Matrix::identity(model.dimension());
    if (model.is_constant()) return mat_exp(model.drift(), dt);
    return integrate_time_varying(model, t, dt, false).phi;
}

Matrix noise_gramian(const LinearSystemModel& model, double t, double dt) {
    require_dt(dt, false);
    if (model.is_constant()) return lti_gramian(model.drift(), model.noise_intensity(), dt).gramian;
    return integrate_time_varying(model, t, dt, true).gramian;
}

IncrementDistribution increment_distribution(const LinearSystemModel& model, std::span<const double> x_t, double t,
                                             double dt) {
    require_dt(dt, false);
    if (x_t.size() != model.dimension()) throw StructuralError("increment_distribution: state size mismatch");
    require_finite(x_t, "increment_distribution state");

    Matrix phi;
    Matrix w;
    if (model.is_constant()) {
        phi = mat_exp(model.drift(), dt);
        w = lti_gramian(model.drift(), model.noise_intensity(), dt).gramian;
    } else {
        auto both = integrate_time_varying(model, t, dt, true);
        phi = std::move(both.phi);
        w = std::move(both.gramian);
    }
    phi -= Matrix::identity(model.dimension());
    return {phi * x_t, std::move(w), t, dt};
}

Vector gramian_derivative_residual(const LinearSystemModel& model, std::span<const double> dt_grid, double step) {
    const Matrix& a = model.drift();
    const Matrix& noise = model.noise_intensity();
    Vector out;
    out.reserve(dt_grid.size());
    for (double dt : dt_grid) {
        require_dt(dt, false);
        const double h = step > 0.0 ? step : 1e-3 * dt;
        if (!(h < dt)) throw InputError("gramian_derivative_residual: step must be smaller than dt");
        const Matrix w_plus = lti_gramian(a, noise, dt + h).gramian;
        const Matrix w_minus = lti_gramian(a, noise, dt - h).gramian;
        const Matrix w = lti_gramian(a, noise, dt).gramian;
        const Matrix fd = (1.0 / (2.0 * h)) * (w_plus - w_minus);
        const Matrix rhs = a * w + w * a.transpose() + noise;
        out.push_back(max_abs_diff(fd, rhs));
    }
    return out;
}

TrajectoryDataset sample_paths(const LinearSystemModel& model, std::span<const double> x0, double dt,
                               std::size_t steps, std::size_t trials, std::uint64_t seed, Execution exec) {
    require_dt(dt, false);
    if (steps < 1) throw InputError("sample_paths: need at least one step");
    if (trials < 1) throw InputError("sample_paths: need at least one trial");
    if (x0.size() != model.dimension()) throw StructuralError("sample_paths: x0 size mismatch");
    require_finite(x0, "sample_paths x0");
    if (trials > 0xFFFFFFFFu || steps > 0xFFFFFFFFu) throw InputError("sample_paths: trial/step count too large");

    const std::size_t n = model.dimension();
    const auto both = lti_gramian(model.drift(), model.noise_intensity(), dt);
    const Matrix phi = mat_exp(model.drift(), dt);
    const Matrix root = psd_sqrt(both.gramian);

    TrajectoryDataset data;
    data.dt = dt;
    data.trials.assign(trials, Trajectory(steps + 1, Vector(n)));

    auto run_trial = [&](std::size_t trial) {
        Trajectory& tr = data.trials[trial];
        tr[0].assign(x0.begin(), x0.end());
        Vector z(n);
        for (std::size_t k = 0; k < steps; ++k) {
            const CounterRng rng(seed, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(k));
            for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal(i);
            Vector next = phi * tr[k];
            const Vector xi = root * z;
            axpy(1.0, xi, next);
            tr[k + 1] = std::move(next);
        }
    };

    const auto count = static_cast<std::ptrdiff_t>(trials);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) run_trial(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) run_trial(static_cast<std::size_t>(i));
    }
    return data;
}

}  // namespace sysrate
