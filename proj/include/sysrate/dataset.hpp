#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sysrate/matrix.hpp"

namespace sysrate {

using Trajectory = std::vector<Vector>;

/// L sampled trials of T+1 states each on a uniform grid k·dt.
struct TrajectoryDataset {
    double dt = 0.0;
    std::vector<Trajectory> trials;

    std::size_t trial_count() const noexcept { return trials.size(); }
    std::size_t step_count() const noexcept { return trials.empty() ? 0 : trials.front().size() - 1; }
    std::size_t dimension() const noexcept {
        return trials.empty() || trials.front().empty() ? 0 : trials.front().front().size();
    }

    /// Increment x(k+1) - x(k) of one trial.
    Vector increment(std::size_t trial, std::size_t step) const;

    /// Throws InputError unless non-empty, rectangular, finite and dt > 0.
    void validate() const;
};

/// CSV with header `trial,k,t,x1,...,xn`, rows sorted by (trial, k), values
/// printed with 17 significant digits.
void write_dataset_csv(std::ostream& out, const TrajectoryDataset& data);
void write_dataset_csv(const std::string& path, const TrajectoryDataset& data);

/// Inverse of write_dataset_csv. dt is taken from the t column of the first trial.
TrajectoryDataset read_dataset_csv(std::istream& in);
TrajectoryDataset read_dataset_csv(const std::string& path);

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

}  // namespace sysrate
