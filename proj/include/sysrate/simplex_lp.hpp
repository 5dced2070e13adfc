#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sysrate/matrix.hpp"

namespace sysrate {

struct LpSolution {
    Vector x;
    double objective = 0.0;
    std::vector<std::size_t> basis;  // column indices of the final basis
    int pivots = 0;
};

/**
 * Dense two-phase primal simplex for
 *
 *     minimize cᵀx  subject to  A x = b,  x >= 0,
 *
 * with Bland's smallest-index rule in both phases. Rows with b_i < 0 are
 * negated first so the artificial basis is feasible. The final basic
 * solution is recomputed from the basis columns with an LU solve.
 *
 * Throws Infeasible when the phase-1 optimum exceeds 1e-9·max(1, ‖b‖₁),
 * and Error when phase 2 is unbounded.
 */
LpSolution solve_lp(const Matrix& a, std::span<const double> b, std::span<const double> c);

}  // namespace sysrate
