#include "sysrate/presets.hpp"

#include "sysrate/errors.hpp"

namespace sysrate {

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all = {
        {"stable", "damped rotation, Hurwitz (bounded complexity)", Matrix{{-0.45, 1.0}, {-1.0, -0.45}},
         Matrix::identity(2), {1.0, 1.0}},
        {"marginal", "double integrator, no Lyapunov equilibrium", Matrix{{0.0, 1.0}, {0.0, 0.0}},
         Matrix::identity(2), {1.0, 0.0}},
        {"unstable", "saddle with eigenvalues +-0.5, no Lyapunov equilibrium", Matrix{{0.0, 1.0}, {0.25, 0.0}},
         Matrix::identity(2), {1.0, 0.0}},
        {"brownian", "scalar Brownian motion", Matrix{{0.0}}, Matrix{{1.0}}, {0.0}},
    };
    return all;
}

const Preset& find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    std::string known;
    for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
    throw InputError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

LinearSystemModel preset_model(std::string_view name) {
    const Preset& p = find_preset(name);
    return LinearSystemModel::constant(p.drift, p.noise);
}

}  // namespace sysrate
