#include "sysrate/simplex_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"

namespace sysrate {

namespace {

constexpr double kFeasibilityTol = 1e-9;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Tableau rows 0..m-1 hold constraints; column `cols` is the right-hand side.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows, cols + 1), basis_(rows, kNone) {}

    double& at(std::size_t r, std::size_t c) { return t_(r, c); }
    double at(std::size_t r, std::size_t c) const { return t_(r, c); }
    double& rhs(std::size_t r) { return t_(r, cols_); }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return rows_; }

    void pivot(std::size_t row, std::size_t col) {
        const double p = t_(row, col);
        for (std::size_t c = 0; c <= cols_; ++c) t_(row, c) /= p;
        t_(row, col) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == row) continue;
            const double f = t_(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) t_(r, c) -= f * t_(row, c);
            t_(r, col) = 0.0;
        }
        basis_[row] = col;
        ++pivots_;
    }

    void drop_row(std::size_t row) {
        Matrix next(rows_ - 1, cols_ + 1);
        for (std::size_t r = 0, w = 0; r < rows_; ++r) {
            if (r == row) continue;
            for (std::size_t c = 0; c <= cols_; ++c) next(w, c) = t_(r, c);
            ++w;
        }
        t_ = std::move(next);
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(row));
        --rows_;
    }

    // Minimizes costᵀx over columns [0, usable). Returns false when unbounded.
    bool optimize(std::span<const double> cost, std::size_t usable, double eps) {
        for (int guard = 0; guard < 100000; ++guard) {
            std::size_t enter = kNone;
            for (std::size_t j = 0; j < usable && enter == kNone; ++j) {
                if (std::find(basis_.begin(), basis_.end(), j) != basis_.end()) continue;
                double reduced = cost[j];
                for (std::size_t r = 0; r < rows_; ++r) reduced -= cost[basis_[r]] * t_(r, j);
                if (reduced < -eps) enter = j;
            }
            if (enter == kNone) return true;

            std::size_t leave = kNone;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double coef = t_(r, enter);
                if (coef <= eps) continue;
                const double ratio = t_(r, cols_) / coef;
                if (leave == kNone || ratio < best - eps) {
                    best = ratio;
                    leave = r;
                } else if (ratio <= best + eps && basis_[r] < basis_[leave]) {
                    best = std::min(best, ratio);
                    leave = r;
                }
            }
            if (leave == kNone) return false;
            pivot(leave, enter);
        }
        throw Error("simplex: iteration limit reached");
    }

    int pivots() const { return pivots_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    Matrix t_;
    std::vector<std::size_t> basis_;
    int pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const Matrix& a, std::span<const double> b, std::span<const double> c) {
    const std::size_t m = a.rows();
    const std::size_t k = a.cols();
    if (m == 0 || k == 0) throw StructuralError("solve_lp: empty constraint matrix");
    if (b.size() != m || c.size() != k) throw StructuralError("solve_lp: dimension mismatch");
    require_finite(a, "solve_lp A");
    require_finite(b, "solve_lp b");
    require_finite(c, "solve_lp c");

    const double eps = 1e-12 * std::max(1.0, a.max_abs());
    double b_norm1 = 0.0;
    for (double v : b) b_norm1 += std::abs(v);

    // Columns: k structural, then m artificials.
    Tableau tab(m, k + m);
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < k; ++j) tab.at(r, j) = sign * a(r, j);
        tab.at(r, k + r) = 1.0;
        tab.rhs(r) = sign * b[r];
        tab.basis()[r] = k + r;
    }

    Vector phase1_cost(k + m, 0.0);
    for (std::size_t r = 0; r < m; ++r) phase1_cost[k + r] = 1.0;
    tab.optimize(phase1_cost, k + m, eps);
    double infeas = 0.0;
    for (std::size_t r = 0; r < tab.rows(); ++r)
        if (tab.basis()[r] >= k) infeas += tab.rhs(r);
    if (infeas > kFeasibilityTol * std::max(1.0, b_norm1))
        throw Infeasible("solve_lp: phase-1 optimum " + std::to_string(infeas) + " > 0; no feasible point");

    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < tab.rows();) {
        if (tab.basis()[r] < k) {
            ++r;
            continue;
        }
        std::size_t col = kNone;
        for (std::size_t j = 0; j < k; ++j) {
            if (std::abs(tab.at(r, j)) > eps && std::find(tab.basis().begin(), tab.basis().end(), j) == tab.basis().end()) {
                col = j;
                break;
            }
        }
        if (col == kNone) {
            tab.drop_row(r);
        } else {
            tab.pivot(r, col);
            ++r;
        }
    }

    Vector phase2_cost(k + m, 0.0);
    std::copy(c.begin(), c.end(), phase2_cost.begin());
    if (!tab.optimize(phase2_cost, k, eps)) throw Error("solve_lp: objective unbounded below");

    LpSolution sol;
    sol.x.assign(k, 0.0);
    sol.basis = tab.basis();
    sol.pivots = tab.pivots();
    for (std::size_t r = 0; r < tab.rows(); ++r) sol.x[sol.basis[r]] = tab.rhs(r);

    // Refine basic values against the original rows kept in the basis.
    if (tab.rows() == m) {
        Matrix basis_cols(m, m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t q = 0; q < m; ++q) basis_cols(r, q) = a(r, sol.basis[q]);
        try {
            const Vector xb = LuDecomposition(basis_cols).solve(b);
            if (std::all_of(xb.begin(), xb.end(), [](double v) { return v > -1e-9; }))
                for (std::size_t q = 0; q < m; ++q) sol.x[sol.basis[q]] = xb[q];
        } catch (const SingularMatrix&) {
            // keep tableau values
        }
    }
    for (double& v : sol.x) v = std::max(0.0, v);
    sol.objective = std::inner_product(c.begin(), c.end(), sol.x.begin(), 0.0);
    return sol;
}

}  // namespace sysrate
