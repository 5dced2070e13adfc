#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sysrate/emulation.hpp"
#include "sysrate/linear_system.hpp"

namespace sysrate {

struct GridSpec {
    enum class Axis { dt, fs } axis = Axis::dt;
    double min = 1e-3;
    double max = 1e3;
    std::size_t points = 100;
    bool log = true;

    /// Strictly increasing dt values (fs grids are inverted and reversed).
    std::vector<double> dt_values() const;
};

struct SampleSpec {
    Vector x0;
    double dt = 0.01;
    std::size_t steps = 300;
    std::size_t trials = 50;
};

/// Parsed run configuration (JSON). The seed is not part of it: randomness
/// comes from the command line only.
struct RunConfig {
    std::string system_label;  // preset name or "custom"
    Matrix drift;
    Matrix noise;
    double distortion = 0.01;
    std::optional<double> capacity_bits;
    GridSpec grid;
    std::optional<SampleSpec> sample;

    LinearSystemModel model() const { return LinearSystemModel::constant(drift, noise); }
};

/// Throws InputError with a readable message on malformed input.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// JSON array of K length-n vectors, or of {"M": [[...]], "b": [...]} objects.
SourceFamily parse_family(const std::string& json_text);
SourceFamily load_family(const std::string& path);
std::string family_to_json(const SourceFamily& family);

}  // namespace sysrate
