#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sysrate/matrix.hpp"

namespace sysrate {

// Tolerances shared by the dense kernels. Read-only; tests import them.
namespace tol {
inline constexpr double symmetry = 1e-9;
inline constexpr double lu_pivot_rel = 1e-13;
inline constexpr double jacobi_offdiag_rel = 1e-12;
inline constexpr int jacobi_max_sweeps = 100;
inline constexpr std::size_t lyapunov_max_n = 64;
// 1-norm bound for the degree-13 Padé approximant (Higham 2005).
inline constexpr double pade13_theta = 5.371920351148152;
}  // namespace tol

/// LU factorization with partial pivoting, PA = LU, stored in place.
class LuDecomposition {
public:
    explicit LuDecomposition(const Matrix& a);

    Vector solve(std::span<const double> b) const;
    Matrix solve(const Matrix& b) const;

    std::size_t size() const noexcept { return lu_.rows(); }

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

/// Solves Ax = b. Throws SingularMatrix when a pivot falls below 1e-13·‖A‖_max.
Vector lu_solve(const Matrix& a, std::span<const double> b);

/// Lower Cholesky factor L with S = LLᵀ. Throws NotPositiveDefinite.
Matrix cholesky(const Matrix& s);

/// log det S for symmetric positive definite S via Cholesky.
double logdet_psd(const Matrix& s);

/// exp(M·t) by scaling and squaring with a degree-13 Padé approximant.
Matrix mat_exp(const Matrix& m, double t = 1.0);

struct SymmetricEigen {
    Vector values;   // descending
    Matrix vectors;  // column i pairs with values[i]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of (S + Sᵀ)/2.
SymmetricEigen sym_eig(const Matrix& s);

/// Solves A W + W Aᵀ + N = 0 by Kronecker vectorization.
/// Throws NoEquilibrium when the Kronecker operator is singular.
Matrix lyapunov_solve(const Matrix& a, const Matrix& n);

/// True when every eigenvalue of A has negative real part. Decided by the
/// Lyapunov test: A P + P Aᵀ + I = 0 must have a positive definite solution.
bool is_hurwitz(const Matrix& a);

/// Some R with R Rᵀ = S for symmetric PSD S. Cholesky when the smallest pivot
/// stays above 1e-12·tr S, otherwise Q·sqrt(max(Λ,0)).
Matrix psd_sqrt(const Matrix& s);

}  // namespace sysrate
