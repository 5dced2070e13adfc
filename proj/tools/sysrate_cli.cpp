// sysrate: rate curves, minimum sampling rates, sample paths and
// data-based emulation for linear stochastic systems.
//
//   sysrate rdf-curve --config cfg.json --out curve.csv
//   sysrate min-rate  --config cfg.json [--capacity 8]
//   sysrate sample    --config cfg.json --out data.csv --seed 42
//   sysrate emulate   data.csv family.json --out emu.csv --seed 42 [--resolution 100] [--paths 1]
//
// Reports go to stdout as one line of key=value pairs.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sysrate/complexity.hpp"
#include "sysrate/config.hpp"
#include "sysrate/dataset.hpp"
#include "sysrate/emulation.hpp"
#include "sysrate/errors.hpp"
#include "sysrate/gaussian_rdf.hpp"

using namespace sysrate;

namespace {

enum ExitCode { ok = 0, usage = 1, bad_input = 2, infeasible = 3, failure = 4 };

class Report {
public:
    Report& add(const std::string& key, const std::string& value) {
        if (!line_.empty()) line_ += ' ';
        line_ += key + '=' + value;
        return *this;
    }
    Report& add(const std::string& key, double value) { return add(key, format_double(value)); }
    Report& add(const std::string& key, std::size_t value) { return add(key, std::to_string(value)); }
    Report& flag(const std::string& word) {
        if (!line_.empty()) line_ += ' ';
        line_ += word;
        return *this;
    }
    const std::string& str() const { return line_; }

private:
    std::string line_;
};

void emit(const Report& report, const std::string& out_path = {}) {
    std::cout << report.str() << '\n';
    if (out_path.empty()) return;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + out_path + "'");
    out << report.str() << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

struct CurveArgs {
    std::string config;
    std::string out;
    std::optional<double> distortion;
    std::uint64_t seed = 0;
};

int cmd_rdf_curve(const CurveArgs& a) {
    const RunConfig cfg = load_run_config(a.config);
    const double d = a.distortion.value_or(cfg.distortion);
    const auto grid = cfg.grid.dt_values();
    const auto axis = cfg.grid.axis == GridSpec::Axis::fs ? RateAxis::by_fs : RateAxis::by_dt;
    const RateCurve curve = rate_curve(cfg.model(), d, grid, axis);
    auto out = open_out(a.out);
    write_rate_curve_csv(out, curve);
    out.close();
    if (!out) throw Error("failed writing '" + a.out + "'");

    Report r;
    r.add("system", cfg.system_label).add("D", d).add("points", curve.samples.size());
    r.add("axis", axis == RateAxis::by_fs ? "fs" : "dt");
    if (curve.asymptote_bits) r.add("asymptote_bits", *curve.asymptote_bits);
    else r.add("asymptote_bits", "none");
    double top = 0.0;
    for (const auto& smp : curve.samples) top = std::max(top, smp.rate_bits);
    r.add("max_rate_bits", top);
    r.add("out", a.out);
    emit(r);
    return ok;
}

struct MinRateArgs {
    std::string config;
    std::string out;
    std::optional<double> distortion;
    std::optional<double> capacity;
    std::uint64_t seed = 0;
};

int cmd_min_rate(const MinRateArgs& a) {
    const RunConfig cfg = load_run_config(a.config);
    const double d = a.distortion.value_or(cfg.distortion);
    const std::optional<double> c = a.capacity ? a.capacity : cfg.capacity_bits;
    if (!c) throw InputError("min-rate: capacity missing (config 'capacity_bits' or --capacity)");

    Report r;
    r.add("system", cfg.system_label).add("D", d).add("capacity_bits", *c);
    SamplingPlan plan;
    try {
        plan = min_sampling_rate(cfg.model(), d, *c);
    } catch (const CapacityInfeasible& e) {
        r.flag("infeasible");
        emit(r, a.out);
        std::cerr << "sysrate: " << e.what() << '\n';
        return infeasible;
    }
    if (plan.needed) {
        r.add("fs_min", plan.fs).add("dt_max", plan.dt).add("rate_bits", plan.rate_bits);
    } else {
        r.flag("not_needed");
        if (plan.ceiling_bits) r.add("ceiling_bits", *plan.ceiling_bits);
        else r.add("ceiling_bits", "none");
        if (plan.zero_rate) r.flag("zero_rate");
        if (!plan.certified) r.flag("uncertified");
    }
    emit(r, a.out);
    return ok;
}

struct SampleArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    std::optional<std::size_t> trials;
};

int cmd_sample(const SampleArgs& a) {
    const RunConfig cfg = load_run_config(a.config);
    if (!cfg.sample) throw InputError("sample: config has no 'sample' section");
    SampleSpec spec = *cfg.sample;
    if (a.trials) spec.trials = *a.trials;
    const auto data = sample_paths(cfg.model(), spec.x0, spec.dt, spec.steps, spec.trials, a.seed);
    write_dataset_csv(a.out, data);

    Report r;
    r.add("system", cfg.system_label).add("trials", spec.trials).add("steps", spec.steps).add("dt", spec.dt);
    r.add("seed", std::to_string(a.seed)).add("out", a.out);
    emit(r);
    return ok;
}

struct EmulateArgs {
    std::string dataset;
    std::string family;
    std::string out;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t resolution = 100;
    std::size_t paths = 1;
    double distortion = 0.01;
    bool total_time_is_dt = false;
};

// Average of the per-step increment covariances: an estimate of W(Δt).
Matrix pooled_covariance(const IncrementStatistics& st) {
    Matrix w(st.covariance.front().rows(), st.covariance.front().cols());
    for (const auto& c : st.covariance) w += c;
    w *= 1.0 / static_cast<double>(st.covariance.size());
    return symmetrize(w);
}

int cmd_emulate(const EmulateArgs& a) {
    const TrajectoryDataset data = read_dataset_csv(a.dataset);
    const SourceFamily family = load_family(a.family);
    if (family.dimension() != data.dimension())
        throw StructuralError("emulate: family dimension " + std::to_string(family.dimension()) +
                              " does not match dataset dimension " + std::to_string(data.dimension()));

    EmulationOptions opts;
    opts.resolution = a.resolution;
    opts.seed = a.seed;
    opts.total_time_is_dt = a.total_time_is_dt;
    const EmulationCodebook codes = build_codebook(data, family);
    const TrajectoryDataset emulated = emulate_paths(codes, family, opts, a.paths);
    write_dataset_csv(a.out, emulated);

    Report r;
    r.add("trials", data.trial_count()).add("steps", data.step_count()).add("dt", data.dt);
    r.add("K", family.size()).add("resolution", a.resolution).add("paths", a.paths);
    r.add("infeasible", codes.infeasible);
    if (codes.infeasible > 0)
        std::cerr << "sysrate: warning: " << codes.infeasible << " increments outside the attainable set were skipped\n";

    const IncrementStatistics train = increment_statistics(data);
    const IncrementStatistics emu = increment_statistics(emulated);
    const StatisticsComparison cmp = compare_increment_statistics(train, emu);
    r.add("mean_pass", cmp.mean_pass_fraction).add("max_mean_z", cmp.max_mean_z);
    if (a.paths >= 2 && data.trial_count() >= 2) r.add("cov_pass", cmp.cov_pass_fraction).add("max_cov_z", cmp.max_cov_z);
    else r.add("cov_pass", "na");

    // Minimum code rate for the increments at the requested distortion,
    // from the pooled training covariance and, given a config, from the model.
    if (data.trial_count() >= 2) {
        const double rate = rdf(GaussianSource(pooled_covariance(train)), a.distortion).rate_bits;
        r.add("D", a.distortion).add("rate_bits_data", rate).add("bits_per_s_data", rate / data.dt);
    }
    if (!a.config.empty()) {
        const RunConfig cfg = load_run_config(a.config);
        const double rate = complexity(cfg.model(), 0.0, data.dt, a.distortion).rate_bits;
        r.add("rate_bits_model", rate).add("bits_per_s_model", rate / data.dt);
    }
    r.add("out", a.out);
    emit(r);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complexity and emulation of linear stochastic systems"};
    app.require_subcommand(1);

    CurveArgs curve;
    auto* c = app.add_subcommand("rdf-curve", "Minimum code rate over a sampling-interval grid (CSV)");
    c->add_option("--config", curve.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    c->add_option("--out", curve.out, "Output CSV")->required();
    c->add_option("--distortion", curve.distortion, "Override the config distortion D");
    c->add_option("--seed", curve.seed, "Accepted for uniformity; the curve is deterministic");

    MinRateArgs minr;
    auto* m = app.add_subcommand("min-rate", "Smallest sampling rate meeting a channel capacity");
    m->add_option("--config", minr.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    m->add_option("--out", minr.out, "Also write the report line here");
    m->add_option("--distortion", minr.distortion, "Override the config distortion D");
    m->add_option("--capacity", minr.capacity, "Capacity in bits per sample (overrides config)");
    m->add_option("--seed", minr.seed, "Accepted for uniformity; the search is deterministic");

    SampleArgs samp;
    auto* s = app.add_subcommand("sample", "Exact-discretization sample paths (CSV)");
    s->add_option("--config", samp.config, "Run configuration with a 'sample' section")
        ->required()
        ->check(CLI::ExistingFile);
    s->add_option("--out", samp.out, "Output CSV")->required();
    s->add_option("--seed", samp.seed, "Random seed")->required();
    s->add_option("--trials", samp.trials, "Override the number of trials");

    EmulateArgs emu;
    auto* e = app.add_subcommand("emulate", "Multinomial emulation of a training dataset");
    e->add_option("dataset", emu.dataset, "Training dataset CSV")->required()->check(CLI::ExistingFile);
    e->add_option("family", emu.family, "Source family JSON")->required()->check(CLI::ExistingFile);
    e->add_option("--out", emu.out, "Output CSV of emulated paths")->required();
    e->add_option("--seed", emu.seed, "Random seed")->required();
    e->add_option("--resolution,-N", emu.resolution, "Multinomial trial count")->capture_default_str();
    e->add_option("--paths", emu.paths, "Number of emulated paths")->capture_default_str();
    e->add_option("--distortion", emu.distortion, "Distortion for the reported rate")->capture_default_str();
    e->add_option("--config", emu.config, "Model config for the reported model rate")->check(CLI::ExistingFile);
    e->add_flag("--total-time-is-dt", emu.total_time_is_dt, "Decode with Z = dt instead of the averaged Z");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? ok : usage;
    }

    try {
        if (*c) return cmd_rdf_curve(curve);
        if (*m) return cmd_min_rate(minr);
        if (*s) return cmd_sample(samp);
        if (*e) return cmd_emulate(emu);
    } catch (const InputError& err) {
        std::cerr << "sysrate: " << err.what() << '\n';
        return bad_input;
    } catch (const StructuralError& err) {
        std::cerr << "sysrate: " << err.what() << '\n';
        return bad_input;
    } catch (const std::exception& err) {
        std::cerr << "sysrate: " << err.what() << '\n';
        return failure;
    }
    return usage;
}
