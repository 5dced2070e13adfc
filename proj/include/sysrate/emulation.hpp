#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sysrate/dataset.hpp"
#include "sysrate/execution.hpp"
#include "sysrate/matrix.hpp"
#include "sysrate/rng.hpp"

namespace sysrate {

struct ConstantField {
    Vector v;
};

/// V(x) = M x + b.
struct AffineField {
    Matrix m;
    Vector b;
};

using VectorField = std::variant<ConstantField, AffineField>;

/// The K autonomous vector fields of an emulating system.
class SourceFamily {
public:
    explicit SourceFamily(std::vector<VectorField> fields);
    static SourceFamily constant(const std::vector<Vector>& vectors);

    std::size_t size() const noexcept { return fields_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    bool all_constant() const noexcept { return all_constant_; }
    const std::vector<VectorField>& fields() const noexcept { return fields_; }

    Vector evaluate(std::size_t i, std::span<const double> x) const;

    /// n×K matrix whose columns are V_i(x).
    Matrix field_matrix(std::span<const double> x) const;

private:
    std::vector<VectorField> fields_;
    std::size_t dimension_ = 0;
    bool all_constant_ = true;
};

/// Integer grid {-r..r}^2 in row order (x1 outer, x2 inner), optionally
/// without the origin. grid_family() is the 24-field planar family.
SourceFamily grid_family(int radius = 2, bool include_origin = false);

/// One field active per uniform segment of length horizon/N.
struct OneHotSchedule {
    std::vector<std::size_t> indices;
    double horizon = 0.0;
};

/// Piecewise-constant {0,1}^K activation. patterns[0] holds on
/// [0, switch_times[0]), patterns[j] on [switch_times[j-1], switch_times[j]),
/// and the last pattern up to the horizon.
struct OverlappingSchedule {
    std::vector<double> switch_times;
    std::vector<std::vector<bool>> patterns;
    double horizon = 0.0;
};

using ActivationSchedule = std::variant<OneHotSchedule, OverlappingSchedule>;

/// Terminal state of ẋ = Σ V_i(x) u_i(t) from x_t over the schedule horizon.
/// Constant-field segments advance in closed form; others use fixed-step RK4.
Vector endpoint_map(const SourceFamily& family, std::span<const double> x_t, const ActivationSchedule& schedule);

/// Greedy N-segment index sequence tracking the straight line from x_t to
/// x_t + target_dx. Ties go to the lowest index.
std::vector<std::size_t> onehot_compress(const SourceFamily& family, std::span<const double> x_t,
                                         std::span<const double> target_dx, std::size_t segments, double dt);

/// (N/L)·log2 K bits per symbol for the (K^N, L) block code.
double onehot_code_rate(std::size_t family_size, std::size_t segments, std::size_t blocklength);

/// Point (p, Z) of the attainable set: p on the simplex, Z total flow time.
struct SimplexCode {
    Vector p;
    double z = 0.0;
};

/// Minimum total-flow-time code: argmin ‖δt‖₁ s.t. Σ V_j(x_t) δt_j = target, δt >= 0.
/// A zero target gives Z = 0 and uniform p. Throws Infeasible outside the
/// conic hull of the fields.
SimplexCode simplex_compress(const SourceFamily& family, std::span<const double> x_t,
                             std::span<const double> target_dx);
SimplexCode simplex_compress(const SourceFamily& family, std::span<const double> target_dx);

/// Z · Σ V_i(x_t) p_i.
Vector simplex_decompress(const SourceFamily& family, std::span<const double> x_t, const SimplexCode& code);

struct IntegerCode {
    std::vector<std::size_t> counts;
    std::size_t resolution = 0;
};

/// Largest-remainder apportionment of `resolution` units among p.
IntegerCode integer_quantize(const SimplexCode& code, std::size_t resolution);

/// Counts drawn from Multinomial(resolution, p) as independent categorical
/// trials on the counter stream `rng`.
IntegerCode sample_multinomial(std::span<const double> p, std::size_t resolution, const CounterRng& rng);

/// log2 C(N+K-1, K-1): number of distinct integer codes.
double integer_code_log2_count(std::size_t family_size, std::size_t resolution);

struct EmulationOptions {
    std::size_t resolution = 100;
    std::uint64_t seed = 0;
    // Replace the averaged Z̃ by dt in the decompressor.
    bool total_time_is_dt = false;
    Execution exec = Execution::parallel;
};

/// Per-step averaged codes of a training dataset.
struct EmulationCodebook {
    double dt = 0.0;
    Vector x0;                         // mean of the trials' initial states
    std::vector<Vector> p;             // p̃(k), one per step
    std::vector<double> z;             // Z̃(k)
    std::vector<std::size_t> feasible; // trials averaged at step k
    std::size_t infeasible = 0;        // skipped increments over all steps
};

/// Compresses every observed increment and averages (p, Z) over the trials
/// with a plain arithmetic mean. Infeasible increments are skipped and
/// counted; a step with no feasible increment throws Infeasible.
EmulationCodebook build_codebook(const TrajectoryDataset& data, const SourceFamily& family,
                                 Execution exec = Execution::parallel);

/// One emulated trajectory; `path` selects an independent random stream.
Trajectory emulate_path(const EmulationCodebook& codes, const SourceFamily& family, const EmulationOptions& options,
                        std::uint32_t path = 0);

/// Paths 0..paths-1 as the trials of one dataset.
TrajectoryDataset emulate_paths(const EmulationCodebook& codes, const SourceFamily& family,
                                const EmulationOptions& options, std::size_t paths);

struct EmulationResult {
    TrajectoryDataset trajectory;  // single trial
    std::size_t infeasible = 0;
};

EmulationResult emulate(const TrajectoryDataset& data, const SourceFamily& family, const EmulationOptions& options);

/// Per-step sample mean and covariance of increments across trials.
struct IncrementStatistics {
    std::size_t trials = 0;
    std::vector<Vector> mean;
    std::vector<Matrix> covariance;  // unbiased (divides by trials-1); zero when trials == 1
};

IncrementStatistics increment_statistics(const TrajectoryDataset& data);

struct StatisticsComparison {
    double mean_pass_fraction = 0.0;  // steps whose mean gaps are all within z standard errors
    double cov_pass_fraction = 0.0;   // same for covariance entries
    double max_mean_z = 0.0;          // worst gap in standard-error units
    double max_cov_z = 0.0;
};

/// Two-sample comparison of per-step increment statistics. Mean standard
/// error sqrt(s²_a/L_a + s²_b/L_b); covariance entry standard error
/// sqrt((C_ii C_jj + C_ij²)/(L-1)) per sample, combined in quadrature.
StatisticsComparison compare_increment_statistics(const IncrementStatistics& reference,
                                                  const IncrementStatistics& candidate, double z = 3.0);

}  // namespace sysrate
