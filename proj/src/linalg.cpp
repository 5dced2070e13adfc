#include "sysrate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sysrate/errors.hpp"

namespace sysrate {

LuDecomposition::LuDecomposition(const Matrix& a) : lu_(a), perm_(a.rows()) {
    require_square(a, "LuDecomposition");
    const std::size_t n = a.rows();
    const double threshold = tol::lu_pivot_rel * a.max_abs();
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(lu_(r, k)) > best) {
                best = std::abs(lu_(r, k));
                p = r;
            }
        }
        if (best <= threshold) {
            throw SingularMatrix("LU: pivot " + std::to_string(best) + " at column " + std::to_string(k) +
                                 " below threshold");
        }
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(p, c));
            std::swap(perm_[k], perm_[p]);
        }
        const double pivot = lu_(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = lu_(r, k) / pivot;
            lu_(r, k) = f;
            if (f == 0.0) continue;
            for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
        }
    }
}

Vector LuDecomposition::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw StructuralError("LU solve: rhs size mismatch");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

Matrix LuDecomposition::solve(const Matrix& b) const {
    if (b.rows() != lu_.rows()) throw StructuralError("LU solve: rhs rows mismatch");
    Matrix x(b.rows(), b.cols());
    Vector col(b.rows());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t r = 0; r < b.rows(); ++r) col[r] = b(r, c);
        const Vector sol = solve(col);
        for (std::size_t r = 0; r < b.rows(); ++r) x(r, c) = sol[r];
    }
    return x;
}

Vector lu_solve(const Matrix& a, std::span<const double> b) {
    require_finite(a, "lu_solve");
    require_finite(b, "lu_solve");
    return LuDecomposition(a).solve(b);
}

namespace {

// Returns the factor and the smallest squared pivot seen; stops early (with
// ok=false) on a non-positive pivot.
struct CholeskyAttempt {
    Matrix factor;
    double min_pivot = 0.0;
    bool ok = false;
};

CholeskyAttempt try_cholesky(const Matrix& s) {
    const std::size_t n = s.rows();
    CholeskyAttempt out{Matrix(n, n), INFINITY, true};
    Matrix& l = out.factor;
    for (std::size_t j = 0; j < n; ++j) {
        double d = s(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        out.min_pivot = std::min(out.min_pivot, d);
        if (!(d > 0.0)) {
            out.ok = false;
            return out;
        }
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return out;
}

}  // namespace

Matrix cholesky(const Matrix& s) {
    require_square(s, "cholesky");
    require_finite(s, "cholesky");
    auto attempt = try_cholesky(symmetrize(s));
    if (!attempt.ok) throw NotPositiveDefinite("cholesky: matrix is not positive definite");
    return std::move(attempt.factor);
}

double logdet_psd(const Matrix& s) {
    const Matrix l = cholesky(s);
    double acc = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
    return 2.0 * acc;
}

Matrix psd_sqrt(const Matrix& s) {
    require_square(s, "psd_sqrt");
    const Matrix sym = symmetrize(s);
    const double tr = std::max(0.0, sym.trace());
    if (tr == 0.0) return Matrix(s.rows(), s.cols());
    auto attempt = try_cholesky(sym);
    if (attempt.ok && attempt.min_pivot >= 1e-12 * tr) return std::move(attempt.factor);

    const SymmetricEigen eig = sym_eig(sym);
    Matrix r = eig.vectors;
    for (std::size_t c = 0; c < r.cols(); ++c) {
        const double sq = std::sqrt(std::max(0.0, eig.values[c]));
        for (std::size_t i = 0; i < r.rows(); ++i) r(i, c) *= sq;
    }
    return r;
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& n) {
    require_square(a, "lyapunov_solve(A)");
    require_square(n, "lyapunov_solve(N)");
    if (a.rows() != n.rows()) throw StructuralError("lyapunov_solve: A and N sizes differ");
    if (a.rows() > tol::lyapunov_max_n) throw StructuralError("lyapunov_solve: n exceeds 64");
    require_finite(a, "lyapunov_solve(A)");
    require_finite(n, "lyapunov_solve(N)");

    // Column-major vec: vec(AW) = (I⊗A) vec W, vec(WAᵀ) = (A⊗I) vec W.
    const std::size_t dim = a.rows();
    const std::size_t m = dim * dim;
    Matrix kron(m, m);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < dim; ++i) {
            const std::size_t row = j * dim + i;  // entry (i, j) of W
            for (std::size_t k = 0; k < dim; ++k) {
                kron(row, j * dim + k) += a(i, k);  // (A W)_{ij} = Σ_k A_ik W_kj
                kron(row, k * dim + i) += a(j, k);  // (W Aᵀ)_{ij} = Σ_k W_ik A_jk
            }
        }
    }
    Vector rhs(m);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) rhs[j * dim + i] = -n(i, j);

    Vector w;
    try {
        w = LuDecomposition(kron).solve(rhs);
    } catch (const SingularMatrix&) {
        throw NoEquilibrium("lyapunov_solve: A and -Aᵀ share an eigenvalue; no unique solution");
    }
    Matrix out(dim, dim);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) out(i, j) = w[j * dim + i];
    out = symmetrize(out);
    if (!out.all_finite()) throw NoEquilibrium("lyapunov_solve: solution overflowed");
    return out;
}

bool is_hurwitz(const Matrix& a) {
    require_square(a, "is_hurwitz");
    Matrix p;
    try {
        p = lyapunov_solve(a, Matrix::identity(a.rows()));
    } catch (const NoEquilibrium&) {
        return false;
    }
    return try_cholesky(p).ok;
}

}  // namespace sysrate
