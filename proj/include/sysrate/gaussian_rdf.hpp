#pragma once

#include <numbers>

#include "sysrate/matrix.hpp"

namespace sysrate {

/// Memoryless multivariate Gaussian source N(mean, covariance).
class GaussianSource {
public:
    /// Validates shape and symmetry; eigenvalues below -1e-9 (relative to the
    /// largest magnitude) are rejected, smaller negatives are clamped to zero
    /// when the rate is computed.
    GaussianSource(Vector mean, Matrix covariance);

    /// Zero-mean source.
    explicit GaussianSource(Matrix covariance);

    std::size_t dimension() const noexcept { return mean_.size(); }
    const Vector& mean() const noexcept { return mean_; }
    const Matrix& covariance() const noexcept { return covariance_; }

private:
    Vector mean_;
    Matrix covariance_;
};

struct RdfResult {
    double rate_nats = 0.0;
    double rate_bits = 0.0;
    double water_level = 0.0;
    Vector variances;    // eigenvalues σ_i², descending, clamped at 0
    Vector allocations;  // D_i = min(θ, σ_i²), paired with variances
};

namespace rdf_tol {
inline constexpr double psd = 1e-9;
inline constexpr double zero_mode_rel = 1e-12;
inline constexpr double bisection_rel = 1e-12;
}  // namespace rdf_tol

/// Rate distortion function under mean-square distortion by reverse
/// water-filling on the covariance eigenvalues.
RdfResult rdf(const GaussianSource& source, double distortion);

/// Same rate from the eigenvalues directly (descending or not).
RdfResult rdf_from_variances(Vector variances, double distortion);

/// ½ log det Σ − (n/2) ln(D/n) in nats. Valid only for D/n < min σ_i²;
/// throws DomainError otherwise.
double rdf_logdet_fastpath(const GaussianSource& source, double distortion);

inline double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

}  // namespace sysrate
