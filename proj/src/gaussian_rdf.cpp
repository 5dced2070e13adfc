#include "sysrate/gaussian_rdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"

namespace sysrate {

GaussianSource::GaussianSource(Vector mean, Matrix covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
    if (mean_.empty()) throw InputError("GaussianSource: dimension must be positive");
    require_square(covariance_, "GaussianSource");
    if (covariance_.rows() != mean_.size()) throw StructuralError("GaussianSource: mean/covariance size mismatch");
    require_finite(mean_, "GaussianSource mean");
    require_finite(covariance_, "GaussianSource covariance");
    const double scale = std::max(1.0, covariance_.max_abs());
    if (!is_symmetric(covariance_, rdf_tol::psd * scale))
        throw InputError("GaussianSource: covariance is not symmetric");
}

GaussianSource::GaussianSource(Matrix covariance)
    : GaussianSource(Vector(covariance.rows(), 0.0), std::move(covariance)) {}

RdfResult rdf_from_variances(Vector variances, double distortion) {
    if (!(distortion >= 0.0) || !std::isfinite(distortion))
        throw InputError("rdf: distortion must be finite and >= 0");
    if (variances.empty()) throw InputError("rdf: empty source");
    std::sort(variances.begin(), variances.end(), std::greater<>());
    const double top = std::max(0.0, variances.front());
    for (double& v : variances) {
        if (v < -rdf_tol::psd * std::max(1.0, top))
            throw InputError("rdf: covariance is not positive semidefinite (eigenvalue " + std::to_string(v) + ")");
        if (v <= rdf_tol::zero_mode_rel * top) v = 0.0;
    }

    const double total = std::accumulate(variances.begin(), variances.end(), 0.0);
    RdfResult out;
    out.variances = variances;
    if (distortion >= total) {
        out.water_level = top;
        out.allocations = variances;
        return out;
    }

    auto water = [&variances](double theta) {
        double s = 0.0;
        for (double v : variances) s += std::min(theta, v);
        return s;
    };
    double lo = 0.0;
    double hi = top;
    const double tolerance = rdf_tol::bisection_rel * std::max(1.0, total);
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (water(mid) < distortion ? lo : hi) = mid;
    }
    // Inside the final bracket Σ min(θ, σ²) is linear; solve it exactly there.
    const double w_lo = water(lo);
    const double w_hi = water(hi);
    double theta = hi;
    if (w_hi > w_lo) theta = lo + (distortion - w_lo) * (hi - lo) / (w_hi - w_lo);
    theta = std::clamp(theta, lo, hi);

    out.water_level = theta;
    out.allocations.resize(variances.size());
    double nats = 0.0;
    for (std::size_t i = 0; i < variances.size(); ++i) {
        const double di = std::min(theta, variances[i]);
        out.allocations[i] = di;
        if (variances[i] > 0.0 && di > 0.0 && variances[i] > di) nats += 0.5 * std::log(variances[i] / di);
    }
    if (distortion == 0.0 && std::any_of(variances.begin(), variances.end(), [](double v) { return v > 0.0; }))
        nats = INFINITY;
    out.rate_nats = nats;
    out.rate_bits = nats_to_bits(nats);
    return out;
}

RdfResult rdf(const GaussianSource& source, double distortion) {
    return rdf_from_variances(sym_eig(source.covariance()).values, distortion);
}

double rdf_logdet_fastpath(const GaussianSource& source, double distortion) {
    if (!(distortion > 0.0)) throw DomainError("rdf_logdet_fastpath: requires D > 0");
    const auto n = static_cast<double>(source.dimension());
    const Vector ev = sym_eig(source.covariance()).values;
    const double min_var = *std::min_element(ev.begin(), ev.end());
    if (!(distortion / n < min_var))
        throw DomainError("rdf_logdet_fastpath: D/n must be strictly below the smallest eigenvalue");
    double logdet = 0.0;
    try {
        logdet = logdet_psd(source.covariance());
    } catch (const NotPositiveDefinite&) {
        throw DomainError("rdf_logdet_fastpath: covariance is not positive definite");
    }
    return 0.5 * logdet - 0.5 * n * std::log(distortion / n);
}

}  // namespace sysrate
