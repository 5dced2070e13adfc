#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sysrate/execution.hpp"
#include "sysrate/gaussian_rdf.hpp"
#include "sysrate/linear_system.hpp"

namespace sysrate {

struct ComplexityQuery {
    LinearSystemModel model;
    double t = 0.0;
    double dt = 1.0;
    double distortion = 0.0;
};

/// Minimum admissible code rate for the forward increment ΔX(t) over dt at
/// mean-square distortion D. When the increment covariance overflows the
/// double range the rate is reported as +inf.
RdfResult complexity(const ComplexityQuery& query);
RdfResult complexity(const LinearSystemModel& model, double t, double dt, double distortion);

/// Rate of the stationary increment law N(0, W∞) for Hurwitz A.
/// Throws NoEquilibrium when A is not Hurwitz.
RdfResult complexity_ceiling(const LinearSystemModel& model, double distortion);

enum class RateAxis { by_dt, by_fs };

struct RateSample {
    double dt = 0.0;
    double fs = 0.0;
    double rate_bits = 0.0;
};

struct RateCurve {
    RateAxis axis = RateAxis::by_dt;
    double distortion = 0.0;
    std::optional<double> asymptote_bits;  // present iff A is Hurwitz
    std::uint64_t model_hash = 0;
    std::vector<RateSample> samples;       // ascending in the axis variable
};

/// Rate at every dt of a strictly increasing positive grid.
RateCurve rate_curve(const LinearSystemModel& model, double distortion, std::span<const double> dt_grid,
                     RateAxis axis = RateAxis::by_dt, Execution exec = Execution::parallel);

/// `# D=...,asymptote_bits=...|none,model_hash=...` then `dt,fs,rate_bits`.
void write_rate_curve_csv(std::ostream& out, const RateCurve& curve);

namespace sampling_tol {
inline constexpr double margin_bits = 1e-9;
inline constexpr double dt_min = 1e-6;
inline constexpr double probe_dt_lo = 1e-3;
inline constexpr double probe_dt_hi = 1e3;
inline constexpr std::size_t probe_points = 121;
inline constexpr double extend_dt_hi = 1e12;
inline constexpr double bisection_rel = 1e-13;
}  // namespace sampling_tol

struct SamplingPlan {
    bool needed = true;              // false: any sampling rate meets the capacity
    double fs = 0.0;                 // minimum sampling rate (needed == true)
    double dt = 0.0;                 // 1/fs
    double rate_bits = 0.0;          // rate at dt
    std::optional<double> ceiling_bits;
    bool zero_rate = false;          // rate is 0 for every probed dt
    bool certified = true;           // not_needed backed by a Lyapunov ceiling
};

/// Smallest sampling rate fs with R_{1/fs}(D) < C - 1e-9 bits.
/// Throws CapacityInfeasible when even dt = 1e-6 needs more than C bits.
SamplingPlan min_sampling_rate(const LinearSystemModel& model, double distortion, double capacity_bits);

/// FNV-1a over the shape and entries of A and N.
std::uint64_t model_hash(const LinearSystemModel& model);

/// `points` log-spaced values from lo to hi inclusive.
std::vector<double> logspace(double lo, double hi, std::size_t points);
std::vector<double> linspace(double lo, double hi, std::size_t points);

}  // namespace sysrate
