#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sysrate/linear_system.hpp"

namespace sysrate {

/// Shipped demonstration systems.
///
///   stable    A = [[-0.45, 1], [-1, -0.45]], N = I   damped rotation, Hurwitz;
///             W∞ = I/0.9, ceiling at D = 0.01 is about 7.80 bits
///   marginal  A = [[0, 1], [0, 0]],          N = I   double integrator; no
///             Lyapunov solution, rate grows like log Δt
///   unstable  A = [[0, 1], [0.25, 0]],       N = I   saddle with eigenvalues
///             ±0.5; no Lyapunov solution, rate grows linearly in Δt
///   brownian  A = [[0]],                     N = [[1]] scalar Brownian motion
struct Preset {
    std::string name;
    std::string description;
    Matrix drift;
    Matrix noise;
    Vector x0;
};

const std::vector<Preset>& presets();

/// Throws InputError for unknown names.
const Preset& find_preset(std::string_view name);

LinearSystemModel preset_model(std::string_view name);

}  // namespace sysrate
