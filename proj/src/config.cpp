#include "sysrate/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sysrate/complexity.hpp"
#include "sysrate/errors.hpp"
#include "sysrate/presets.hpp"

namespace sysrate {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

Matrix matrix_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InputError(std::string(what) + ": expected a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) {
        if (!r.is_array()) throw InputError(std::string(what) + ": each row must be an array");
        std::vector<double> row;
        for (const auto& v : r) {
            if (!v.is_number()) throw InputError(std::string(what) + ": entries must be numbers");
            row.push_back(v.get<double>());
        }
        rows.push_back(std::move(row));
    }
    return Matrix::from_rows(rows);
}

Vector vector_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InputError(std::string(what) + ": expected a non-empty array");
    Vector v;
    for (const auto& x : j) {
        if (!x.is_number()) throw InputError(std::string(what) + ": entries must be numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

double number_from(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw InputError(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
}

std::size_t count_from(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw InputError(std::string("config: '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

}  // namespace

std::vector<double> GridSpec::dt_values() const {
    if (points < 1) throw InputError("grid: points must be >= 1");
    if (!(min > 0.0) || !(max >= min)) throw InputError("grid: need 0 < min <= max");
    if (points > 1 && !(max > min)) throw InputError("grid: max must exceed min when points > 1");
    std::vector<double> v = log ? logspace(min, max, points) : linspace(min, max, points);
    if (axis == Axis::fs) {
        for (double& x : v) x = 1.0 / x;
        std::reverse(v.begin(), v.end());
    }
    return v;
}

namespace {

RunConfig run_config_from(const json& root) {
    if (!root.is_object()) throw InputError("config: top level must be an object");
    if (!root.contains("system")) throw InputError("config: missing 'system'");
    const json& sys = root.at("system");

    RunConfig cfg;
    std::optional<Vector> preset_x0;
    if (sys.is_string()) {
        const Preset& p = find_preset(sys.get<std::string>());
        cfg.system_label = p.name;
        cfg.drift = p.drift;
        cfg.noise = p.noise;
        preset_x0 = p.x0;
    } else if (sys.is_object()) {
        if (sys.contains("preset")) {
            const Preset& p = find_preset(sys.at("preset").get<std::string>());
            cfg.system_label = p.name;
            cfg.drift = p.drift;
            cfg.noise = p.noise;
            preset_x0 = p.x0;
        } else {
            cfg.system_label = "custom";
            if (!sys.contains("A")) throw InputError("config: system needs 'preset' or 'A'");
        }
        if (sys.contains("A")) cfg.drift = matrix_from(sys.at("A"), "system.A");
        if (sys.contains("N")) cfg.noise = matrix_from(sys.at("N"), "system.N");
        if (cfg.noise.empty()) throw InputError("config: custom system needs 'N'");
    } else {
        throw InputError("config: 'system' must be a preset name or an object");
    }
    // Validates shapes, symmetry and PSD.
    (void)cfg.model();

    cfg.distortion = number_from(root, "distortion", cfg.distortion);
    if (!(cfg.distortion >= 0.0)) throw InputError("config: distortion must be >= 0");
    if (root.contains("capacity_bits")) {
        cfg.capacity_bits = number_from(root, "capacity_bits", 0.0);
        if (!(*cfg.capacity_bits > 0.0)) throw InputError("config: capacity_bits must be > 0");
    }

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        if (!g.is_object()) throw InputError("config: 'grid' must be an object");
        if (g.contains("axis")) {
            const auto axis = g.at("axis").get<std::string>();
            if (axis == "dt") cfg.grid.axis = GridSpec::Axis::dt;
            else if (axis == "fs") cfg.grid.axis = GridSpec::Axis::fs;
            else throw InputError("config: grid.axis must be 'dt' or 'fs'");
        }
        cfg.grid.min = number_from(g, "min", cfg.grid.min);
        cfg.grid.max = number_from(g, "max", cfg.grid.max);
        cfg.grid.points = count_from(g, "points", cfg.grid.points);
        if (g.contains("log")) cfg.grid.log = g.at("log").get<bool>();
        (void)cfg.grid.dt_values();
    }

    if (root.contains("sample")) {
        const json& s = root.at("sample");
        if (!s.is_object()) throw InputError("config: 'sample' must be an object");
        SampleSpec spec;
        if (s.contains("x0")) spec.x0 = vector_from(s.at("x0"), "sample.x0");
        else if (preset_x0) spec.x0 = *preset_x0;
        else spec.x0.assign(cfg.drift.rows(), 0.0);
        if (s.contains("fs")) {
            const double fs = number_from(s, "fs", 0.0);
            if (!(fs > 0.0)) throw InputError("config: sample.fs must be > 0");
            spec.dt = 1.0 / fs;
        }
        spec.dt = number_from(s, "dt", spec.dt);
        if (s.contains("duration")) {
            const double duration = number_from(s, "duration", 0.0);
            spec.steps = static_cast<std::size_t>(std::llround(duration / spec.dt));
        }
        spec.steps = count_from(s, "steps", spec.steps);
        spec.trials = count_from(s, "trials", spec.trials);
        if (!(spec.dt > 0.0)) throw InputError("config: sample.dt must be > 0");
        if (spec.steps < 1 || spec.trials < 1) throw InputError("config: sample needs steps >= 1 and trials >= 1");
        if (spec.x0.size() != cfg.drift.rows()) throw InputError("config: sample.x0 has the wrong dimension");
        cfg.sample = std::move(spec);
    }
    return cfg;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    const json root = parse_json(json_text, "config");
    try {
        return run_config_from(root);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_file(path)); }

SourceFamily parse_family(const std::string& json_text) {
    const json root = parse_json(json_text, "family");
    if (!root.is_array() || root.empty()) throw InputError("family: expected a non-empty JSON array");
    std::vector<VectorField> fields;
    for (const auto& f : root) {
        if (f.is_array()) {
            fields.emplace_back(ConstantField{vector_from(f, "family vector")});
        } else if (f.is_object() && f.contains("M") && f.contains("b")) {
            fields.emplace_back(AffineField{matrix_from(f.at("M"), "family.M"), vector_from(f.at("b"), "family.b")});
        } else {
            throw InputError("family: each entry must be a vector or an {M, b} object");
        }
    }
    return SourceFamily(std::move(fields));
}

SourceFamily load_family(const std::string& path) { return parse_family(read_file(path)); }

std::string family_to_json(const SourceFamily& family) {
    json out = json::array();
    for (const auto& f : family.fields()) {
        if (const auto* c = std::get_if<ConstantField>(&f)) {
            out.push_back(c->v);
        } else {
            const auto& a = std::get<AffineField>(f);
            out.push_back({{"M", a.m.to_rows()}, {"b", a.b}});
        }
    }
    return out.dump();
}

}  // namespace sysrate
