#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerical kernels (mat_exp, LU, Jacobi, simplex); each oracle takes a
// different, simpler route so it can check the implementation independently.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "sysrate/matrix.hpp"

namespace oracle {

using sysrate::Matrix;
using sysrate::Vector;

inline Matrix mul(const Matrix& a, const Matrix& b) { return a * b; }

// exp(M) by scaling, a 30-term Taylor series and repeated squaring.
inline Matrix taylor_exp(const Matrix& m) {
    const std::size_t n = m.rows();
    int squarings = 0;
    double norm = m.norm1();
    while (norm > 0.25) {
        norm *= 0.5;
        ++squarings;
    }
    const Matrix a = m * std::ldexp(1.0, -squarings);
    Matrix sum = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * a * (1.0 / k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

// Gauss-Jordan with full pivoting; returns nullopt when singular.
inline std::optional<Matrix> inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(aug(r, c)) > std::abs(aug(p, c))) p = r;
        if (std::abs(aug(p, c)) < 1e-12) return std::nullopt;
        for (std::size_t j = 0; j < 2 * n; ++j) std::swap(aug(c, j), aug(p, j));
        const double piv = aug(c, c);
        for (std::size_t j = 0; j < 2 * n; ++j) aug(c, j) /= piv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = aug(r, c);
            for (std::size_t j = 0; j < 2 * n; ++j) aug(r, j) -= f * aug(c, j);
        }
    }
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

// Trapezoid rule on W(dt) = ∫_0^dt e^{Aτ} N e^{Aᵀτ} dτ with `intervals`
// panels; e^{Aτ} advanced by a Taylor-series step.
inline Matrix gramian_trapezoid(const Matrix& a, const Matrix& noise, double dt, std::size_t intervals) {
    const double h = dt / static_cast<double>(intervals);
    const Matrix step = taylor_exp(a * h);
    Matrix e = Matrix::identity(a.rows());
    Matrix sum(a.rows(), a.cols());
    for (std::size_t k = 0; k <= intervals; ++k) {
        Matrix f = e * noise * e.transpose();
        const double w = (k == 0 || k == intervals) ? 0.5 : 1.0;
        sum += f * w;
        e = e * step;
    }
    return sum * h;
}

// RK4 on dW/dτ = A W + W Aᵀ + N from W(0) = 0.
inline Matrix gramian_ode(const Matrix& a, const Matrix& noise, double horizon, std::size_t steps) {
    const double h = horizon / static_cast<double>(steps);
    auto f = [&](const Matrix& w) { return a * w + w * a.transpose() + noise; };
    Matrix w(a.rows(), a.cols());
    for (std::size_t s = 0; s < steps; ++s) {
        const Matrix k1 = f(w);
        const Matrix k2 = f(w + k1 * (0.5 * h));
        const Matrix k3 = f(w + k2 * (0.5 * h));
        const Matrix k4 = f(w + k3 * h);
        w += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    return w;
}

// Random orthogonal matrix by Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Matrix q(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        Vector v(n);
        for (double& x : v) x = nd(gen);
        for (std::size_t p = 0; p < c; ++p) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += v[i] * q(i, p);
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * q(i, p);
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q(i, c) = v[i] / norm;
    }
    return q;
}

struct HurwitzSample {
    Matrix a;
    double slowest_real_part = 0.0;  // max Re λ (negative)
};

// A = S T S⁻¹ with T block upper-triangular: 2x2 rotation blocks and real
// diagonal entries with known negative real parts.
inline HurwitzSample random_hurwitz(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> re(-2.0, -0.2);
    std::uniform_real_distribution<double> im(0.1, 1.5);
    std::uniform_real_distribution<double> coupling(-0.3, 0.3);
    Matrix t(n, n);
    double slowest = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < n) {
        const double r = re(gen);
        slowest = std::max(slowest, r);
        if (i + 1 < n && (gen() & 1u)) {
            const double w = im(gen);
            t(i, i) = r;
            t(i + 1, i + 1) = r;
            t(i, i + 1) = w;
            t(i + 1, i) = -w;
            i += 2;
        } else {
            t(i, i) = r;
            i += 1;
        }
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r + 2; c < n; ++c) t(r, c) = coupling(gen);
    Matrix s = Matrix::identity(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) s(r, c) += coupling(gen);
    const Matrix s_inv = *inverse(s);
    return {s * t * s_inv, slowest};
}

inline Matrix random_psd(std::size_t n, std::mt19937_64& gen, double ridge = 0.1) {
    std::normal_distribution<double> nd;
    Matrix g(n, n);
    for (double& x : g.data()) x = nd(gen);
    Matrix s = g * g.transpose() * (1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) s(i, i) += ridge;
    return sysrate::symmetrize(s);
}

// Reverse water-filling by scanning θ on a uniform grid over [0, max σ²],
// then solving exactly inside the bracketing cell where Σ min(θ, σ²) is linear.
inline double waterfill_grid_nats(const Vector& variances, double distortion, std::size_t points) {
    double top = 0.0;
    double total = 0.0;
    for (double v : variances) {
        top = std::max(top, v);
        total += v;
    }
    if (distortion >= total) return 0.0;
    auto water = [&](double th) {
        double s = 0.0;
        for (double v : variances) s += std::min(th, v);
        return s;
    };
    double theta = top;
    for (std::size_t k = 1; k < points; ++k) {
        const double hi = top * static_cast<double>(k) / static_cast<double>(points - 1);
        if (water(hi) >= distortion) {
            const double lo = top * static_cast<double>(k - 1) / static_cast<double>(points - 1);
            const double wl = water(lo);
            const double wh = water(hi);
            theta = lo + (distortion - wl) * (hi - lo) / (wh - wl);
            break;
        }
    }
    double r = 0.0;
    for (double v : variances)
        if (v > theta) r += 0.5 * std::log(v / theta);
    return r;
}

// Brute-force min ‖δ‖₁ over basic feasible solutions of V δ = b, δ >= 0.
// A basic solution is supported on linearly independent columns, so every
// column subset of size <= n is solved through its normal equations and kept
// when it reproduces b with nonnegative weights. nullopt when none does.
inline std::optional<double> min_l1_by_vertices(const Matrix& v, const Vector& b) {
    const std::size_t n = v.rows();
    const std::size_t k = v.cols();
    double bnorm = 0.0;
    for (double x : b) bnorm = std::max(bnorm, std::abs(x));
    if (bnorm == 0.0) return 0.0;
    std::optional<double> best;
    std::vector<std::size_t> pick;
    auto try_subset = [&]() {
        const std::size_t m = pick.size();
        Matrix gram(m, m);
        Vector rhs(m, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < m; ++c)
                for (std::size_t i = 0; i < n; ++i) gram(r, c) += v(i, pick[r]) * v(i, pick[c]);
            for (std::size_t i = 0; i < n; ++i) rhs[r] += v(i, pick[r]) * b[i];
        }
        const auto inv = inverse(gram);
        if (!inv) return;
        const Vector x = *inv * rhs;
        double l1 = 0.0;
        for (double xi : x) {
            if (xi < -1e-10) return;
            l1 += std::max(0.0, xi);
        }
        for (std::size_t i = 0; i < n; ++i) {
            double r = -b[i];
            for (std::size_t c = 0; c < m; ++c) r += v(i, pick[c]) * x[c];
            if (std::abs(r) > 1e-9 * std::max(1.0, bnorm)) return;
        }
        if (!best || l1 < *best) best = l1;
    };
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (!pick.empty()) try_subset();
        if (pick.size() == n) return;
        for (std::size_t j = start; j < k; ++j) {
            pick.push_back(j);
            rec(j + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return best;
}

// Exhaustive search over all K^N index sequences for constant fields; returns
// the smallest endpoint distance to `target_dx`.
inline double best_onehot_distance(const std::vector<Vector>& fields, const Vector& target_dx, std::size_t segments,
                                   double dt) {
    const std::size_t k = fields.size();
    const std::size_t n = target_dx.size();
    const double tau = dt / static_cast<double>(segments);
    std::vector<std::size_t> idx(segments, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        Vector end(n, 0.0);
        for (std::size_t s : idx)
            for (std::size_t i = 0; i < n; ++i) end[i] += tau * fields[s][i];
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += (end[i] - target_dx[i]) * (end[i] - target_dx[i]);
        best = std::min(best, std::sqrt(d));
        std::size_t pos = 0;
        while (pos < segments && ++idx[pos] == k) idx[pos++] = 0;
        if (pos == segments) break;
    }
    return best;
}

}  // namespace oracle
