#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sysrate {

using Vector = std::vector<double>;

/**
 * Dense row-major real matrix for small problems (n up to a few dozen).
 *
 * Constructors that take user data reject non-finite entries; arithmetic on
 * finite matrices is not re-checked.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix diagonal(std::span<const double> d);
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }
    std::vector<std::vector<double>> to_rows() const;

    Matrix transpose() const;
    Vector diag() const;
    double trace() const;

    double max_abs() const noexcept;
    double norm1() const noexcept;
    double frobenius() const noexcept;
    bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

// (M + Mᵀ)/2
Matrix symmetrize(const Matrix& m);

// Block [[a, b], [c, d]] from four equally compatible blocks.
Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);
Matrix sub_block(const Matrix& m, std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols);

double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_symmetric(const Matrix& m, double tol);

// Small vector helpers.
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double s);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

void require_square(const Matrix& m, const char* what);
void require_finite(const Matrix& m, const char* what);
void require_finite(std::span<const double> v, const char* what);

}  // namespace sysrate
