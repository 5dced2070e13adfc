#include "sysrate/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <ostream>

#include "sysrate/dataset.hpp"
#include "sysrate/errors.hpp"
#include "sysrate/linalg.hpp"

namespace sysrate {

namespace {

void require_distortion(double d) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw InputError("distortion must be finite and >= 0");
}

RdfResult unbounded_rate(std::size_t n, double distortion) {
    RdfResult r;
    r.rate_nats = INFINITY;
    r.rate_bits = INFINITY;
    r.water_level = distortion / static_cast<double>(n);
    r.variances.assign(n, INFINITY);
    r.allocations.assign(n, r.water_level);
    return r;
}

}  // namespace

RdfResult complexity(const LinearSystemModel& model, double t, double dt, double distortion) {
    require_distortion(distortion);
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("complexity: t must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("complexity: dt must be positive and finite");
    const Matrix w = noise_gramian(model, t, dt);
    if (!w.all_finite()) return unbounded_rate(model.dimension(), distortion);
    return rdf(GaussianSource(w), distortion);
}

RdfResult complexity(const ComplexityQuery& query) {
    return complexity(query.model, query.t, query.dt, query.distortion);
}

RdfResult complexity_ceiling(const LinearSystemModel& model, double distortion) {
    require_distortion(distortion);
    const Matrix& a = model.drift();
    if (!is_hurwitz(a)) throw NoEquilibrium("complexity_ceiling: drift is not Hurwitz; no stationary increment law");
    return rdf(GaussianSource(lyapunov_solve(a, model.noise_intensity())), distortion);
}

RateCurve rate_curve(const LinearSystemModel& model, double distortion, std::span<const double> dt_grid,
                     RateAxis axis, Execution exec) {
    require_distortion(distortion);
    if (dt_grid.empty()) throw InputError("rate_curve: empty grid");
    for (std::size_t i = 0; i < dt_grid.size(); ++i) {
        if (!(dt_grid[i] > 0.0) || !std::isfinite(dt_grid[i])) throw InputError("rate_curve: grid must be positive");
        if (i > 0 && !(dt_grid[i] > dt_grid[i - 1])) throw InputError("rate_curve: grid must be strictly increasing");
    }

    RateCurve curve;
    curve.axis = axis;
    curve.distortion = distortion;
    curve.model_hash = model_hash(model);
    if (model.is_constant() && is_hurwitz(model.drift()))
        curve.asymptote_bits = complexity_ceiling(model, distortion).rate_bits;

    const std::size_t m = dt_grid.size();
    curve.samples.resize(m);
    std::vector<std::exception_ptr> failures(m);
    auto eval = [&](std::size_t i) {
        try {
            const double dt = dt_grid[i];
            curve.samples[i] = {dt, 1.0 / dt, complexity(model, 0.0, dt, distortion).rate_bits};
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const auto count = static_cast<std::ptrdiff_t>(m);
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < count; ++i) eval(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) eval(static_cast<std::size_t>(i));
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    if (axis == RateAxis::by_fs) std::reverse(curve.samples.begin(), curve.samples.end());
    return curve;
}

void write_rate_curve_csv(std::ostream& out, const RateCurve& curve) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(curve.model_hash));
    out << "# D=" << format_double(curve.distortion) << ",asymptote_bits="
        << (curve.asymptote_bits ? format_double(*curve.asymptote_bits) : std::string("none"))
        << ",model_hash=" << hash << ",axis=" << (curve.axis == RateAxis::by_dt ? "dt" : "fs") << '\n';
    out << "dt,fs,rate_bits\n";
    for (const auto& s : curve.samples)
        out << format_double(s.dt) << ',' << format_double(s.fs) << ',' << format_double(s.rate_bits) << '\n';
}

SamplingPlan min_sampling_rate(const LinearSystemModel& model, double distortion, double capacity_bits) {
    require_distortion(distortion);
    if (!(capacity_bits > 0.0) || !std::isfinite(capacity_bits))
        throw InputError("min_sampling_rate: capacity must be positive and finite");
    const Matrix& a = model.drift();
    const double target = capacity_bits - sampling_tol::margin_bits;
    auto rate = [&](double dt) { return complexity(model, 0.0, dt, distortion).rate_bits; };

    SamplingPlan plan;
    if (is_hurwitz(a)) plan.ceiling_bits = complexity_ceiling(model, distortion).rate_bits;

    const auto probe = logspace(sampling_tol::probe_dt_lo, sampling_tol::probe_dt_hi, sampling_tol::probe_points);
    std::vector<double> probe_rates(probe.size());
    for (std::size_t i = 0; i < probe.size(); ++i) probe_rates[i] = rate(probe[i]);
    const bool all_below = std::all_of(probe_rates.begin(), probe_rates.end(), [&](double r) { return r < target; });
    const bool all_zero = std::all_of(probe_rates.begin(), probe_rates.end(), [](double r) { return r == 0.0; });

    if (plan.ceiling_bits && *plan.ceiling_bits < target && all_below) {
        plan.needed = false;
        plan.zero_rate = *plan.ceiling_bits == 0.0 && all_zero;
        return plan;
    }

    // Locate a bracket [lo, hi] with R(lo) < target <= R(hi).
    double lo = 0.0;
    double hi = 0.0;
    const auto first_over =
        std::find_if(probe_rates.begin(), probe_rates.end(), [&](double r) { return r >= target; });
    if (first_over == probe_rates.end()) {
        double dt = probe.back();
        double prev = dt;
        while (dt < sampling_tol::extend_dt_hi) {
            prev = dt;
            dt *= 2.0;
            if (rate(dt) >= target) {
                lo = prev;
                hi = dt;
                break;
            }
        }
        if (hi == 0.0) {
            // Bounded over every probed interval without a Lyapunov certificate.
            plan.needed = false;
            plan.zero_rate = all_zero;
            plan.certified = false;
            return plan;
        }
    } else if (first_over == probe_rates.begin()) {
        lo = sampling_tol::dt_min;
        hi = probe.front();
        if (rate(lo) >= target)
            throw CapacityInfeasible("min_sampling_rate: rate exceeds capacity even at dt = 1e-6");
    } else {
        const auto idx = static_cast<std::size_t>(first_over - probe_rates.begin());
        lo = probe[idx - 1];
        hi = probe[idx];
    }

    for (int iter = 0; iter < 400 && hi / lo - 1.0 > sampling_tol::bisection_rel; ++iter) {
        const double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) break;
        (rate(mid) < target ? lo : hi) = mid;
    }
    plan.needed = true;
    plan.dt = lo;
    plan.fs = 1.0 / lo;
    plan.rate_bits = rate(lo);
    return plan;
}

std::uint64_t model_hash(const LinearSystemModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    auto feed_matrix = [&](const Matrix& m) {
        const std::uint64_t dims[2] = {m.rows(), m.cols()};
        feed(dims, sizeof dims);
        for (double v : m.data()) {
            const double canon = v == 0.0 ? 0.0 : v;  // fold -0.0
            feed(&canon, sizeof canon);
        }
    };
    const std::uint8_t tag = model.is_constant() ? 1 : 2;
    feed(&tag, 1);
    if (model.is_constant()) feed_matrix(model.drift());
    feed_matrix(model.noise_intensity());
    return h;
}

std::vector<double> logspace(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi >= lo) || points == 0) throw InputError("logspace: need 0 < lo <= hi and points >= 1");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i)
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (!(hi >= lo) || points == 0) throw InputError("linspace: need lo <= hi and points >= 1");
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < points; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out.back() = hi;
    return out;
}

}  // namespace sysrate
