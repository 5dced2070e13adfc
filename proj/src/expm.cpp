#include <cmath>

#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"

namespace sysrate {

namespace {

constexpr double kPade13[14] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0,
};

}  // namespace

Matrix mat_exp(const Matrix& m, double t) {
    require_square(m, "mat_exp");
    require_finite(m, "mat_exp");
    if (!std::isfinite(t)) throw InputError("mat_exp: non-finite t");

    const std::size_t n = m.rows();
    Matrix a = m * t;
    const double norm = a.norm1();
    if (norm == 0.0) return Matrix::identity(n);

    int squarings = 0;
    if (norm > tol::pade13_theta) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / tol::pade13_theta)));
        a *= std::ldexp(1.0, -squarings);
    }

    const Matrix ident = Matrix::identity(n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const double* b = kPade13;

    Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    u_inner += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
    const Matrix u = a * u_inner;

    Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

    // (V - U) R = (V + U)
    Matrix r = LuDecomposition(v - u).solve(v + u);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace sysrate
