#include "sysrate/emulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "sysrate/errors.hpp"
#include "sysrate/simplex_lp.hpp"

namespace sysrate {

namespace {

std::size_t field_dimension(const VectorField& f) {
    if (const auto* c = std::get_if<ConstantField>(&f)) return c->v.size();
    const auto& a = std::get<AffineField>(f);
    return a.b.size();
}

// Flow of Σ_{i∈active} V_i for time tau.
Vector flow(const SourceFamily& family, std::span<const double> x, std::span<const std::size_t> active, double tau) {
    Vector y(x.begin(), x.end());
    if (active.empty() || tau == 0.0) return y;

    bool constant = true;
    double lipschitz = 0.0;
    for (std::size_t i : active) {
        if (const auto* a = std::get_if<AffineField>(&family.fields()[i])) {
            constant = false;
            lipschitz += a->m.norm1();
        }
    }
    if (constant) {
        for (std::size_t i : active) axpy(tau, std::get<ConstantField>(family.fields()[i]).v, y);
        return y;
    }

    auto rhs = [&](std::span<const double> z) {
        Vector d(z.size(), 0.0);
        for (std::size_t i : active) axpy(1.0, family.evaluate(i, z), d);
        return d;
    };
    const auto substeps = static_cast<std::size_t>(std::max(64.0, std::ceil(tau * lipschitz * 64.0)));
    const double h = tau / static_cast<double>(substeps);
    for (std::size_t s = 0; s < substeps; ++s) {
        const Vector k1 = rhs(y);
        Vector tmp = y;
        axpy(0.5 * h, k1, tmp);
        const Vector k2 = rhs(tmp);
        tmp = y;
        axpy(0.5 * h, k2, tmp);
        const Vector k3 = rhs(tmp);
        tmp = y;
        axpy(h, k3, tmp);
        const Vector k4 = rhs(tmp);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return y;
}

void require_state(const SourceFamily& family, std::span<const double> x, const char* what) {
    if (x.size() != family.dimension())
        throw StructuralError(std::string(what) + ": state dimension " + std::to_string(x.size()) +
                              " != family dimension " + std::to_string(family.dimension()));
    require_finite(x, what);
}

}  // namespace

SourceFamily::SourceFamily(std::vector<VectorField> fields) : fields_(std::move(fields)) {
    if (fields_.empty()) throw InputError("SourceFamily: need at least one field");
    dimension_ = field_dimension(fields_.front());
    if (dimension_ == 0) throw InputError("SourceFamily: zero-dimensional field");
    for (const auto& f : fields_) {
        if (field_dimension(f) != dimension_) throw StructuralError("SourceFamily: fields differ in dimension");
        if (const auto* c = std::get_if<ConstantField>(&f)) {
            require_finite(c->v, "SourceFamily");
        } else {
            const auto& a = std::get<AffineField>(f);
            if (a.m.rows() != dimension_ || a.m.cols() != dimension_)
                throw StructuralError("SourceFamily: affine field matrix has wrong shape");
            require_finite(a.m, "SourceFamily");
            require_finite(a.b, "SourceFamily");
            all_constant_ = false;
        }
    }
}

SourceFamily SourceFamily::constant(const std::vector<Vector>& vectors) {
    std::vector<VectorField> fields;
    fields.reserve(vectors.size());
    for (const auto& v : vectors) fields.emplace_back(ConstantField{v});
    return SourceFamily(std::move(fields));
}

Vector SourceFamily::evaluate(std::size_t i, std::span<const double> x) const {
    const auto& f = fields_.at(i);
    if (const auto* c = std::get_if<ConstantField>(&f)) return c->v;
    const auto& a = std::get<AffineField>(f);
    Vector y = a.m * x;
    axpy(1.0, a.b, y);
    return y;
}

Matrix SourceFamily::field_matrix(std::span<const double> x) const {
    Matrix m(dimension_, fields_.size());
    for (std::size_t j = 0; j < fields_.size(); ++j) {
        const Vector v = evaluate(j, x);
        for (std::size_t i = 0; i < dimension_; ++i) m(i, j) = v[i];
    }
    return m;
}

SourceFamily grid_family(int radius, bool include_origin) {
    if (radius < 1) throw InputError("grid_family: radius must be >= 1");
    std::vector<Vector> vs;
    for (int a = -radius; a <= radius; ++a)
        for (int b = -radius; b <= radius; ++b)
            if (include_origin || a != 0 || b != 0) vs.push_back({static_cast<double>(a), static_cast<double>(b)});
    return SourceFamily::constant(vs);
}

Vector endpoint_map(const SourceFamily& family, std::span<const double> x_t, const ActivationSchedule& schedule) {
    require_state(family, x_t, "endpoint_map");
    const std::size_t k = family.size();

    if (const auto* onehot = std::get_if<OneHotSchedule>(&schedule)) {
        if (!(onehot->horizon > 0.0)) throw InputError("endpoint_map: horizon must be positive");
        Vector x(x_t.begin(), x_t.end());
        if (onehot->indices.empty()) return x;
        const double tau = onehot->horizon / static_cast<double>(onehot->indices.size());
        for (std::size_t idx : onehot->indices) {
            if (idx >= k) throw InputError("endpoint_map: field index out of range");
            x = flow(family, x, std::span<const std::size_t>(&idx, 1), tau);
        }
        return x;
    }

    const auto& ov = std::get<OverlappingSchedule>(schedule);
    if (!(ov.horizon > 0.0)) throw InputError("endpoint_map: horizon must be positive");
    if (ov.patterns.size() != ov.switch_times.size() + 1)
        throw InputError("endpoint_map: need one more pattern than switching times");
    double prev = 0.0;
    for (double s : ov.switch_times) {
        if (!(s > prev) || !(s < ov.horizon))
            throw InputError("endpoint_map: switching times must increase strictly inside (0, horizon)");
        prev = s;
    }
    Vector x(x_t.begin(), x_t.end());
    double start = 0.0;
    std::vector<std::size_t> active;
    for (std::size_t seg = 0; seg < ov.patterns.size(); ++seg) {
        const auto& pattern = ov.patterns[seg];
        if (pattern.size() != k) throw InputError("endpoint_map: activation pattern length != K");
        const double end = seg < ov.switch_times.size() ? ov.switch_times[seg] : ov.horizon;
        active.clear();
        for (std::size_t i = 0; i < k; ++i)
            if (pattern[i]) active.push_back(i);
        x = flow(family, x, active, end - start);
        start = end;
    }
    return x;
}

std::vector<std::size_t> onehot_compress(const SourceFamily& family, std::span<const double> x_t,
                                         std::span<const double> target_dx, std::size_t segments, double dt) {
    require_state(family, x_t, "onehot_compress");
    if (target_dx.size() != family.dimension()) throw StructuralError("onehot_compress: target size mismatch");
    if (segments < 1) throw InputError("onehot_compress: need at least one segment");
    if (!(dt > 0.0)) throw InputError("onehot_compress: dt must be positive");

    const double tau = dt / static_cast<double>(segments);
    std::vector<std::size_t> out;
    out.reserve(segments);
    Vector x(x_t.begin(), x_t.end());
    for (std::size_t j = 1; j <= segments; ++j) {
        Vector waypoint(x_t.begin(), x_t.end());
        axpy(static_cast<double>(j) / static_cast<double>(segments), target_dx, waypoint);
        std::size_t best = 0;
        double best_dist = INFINITY;
        Vector best_x;
        for (std::size_t i = 0; i < family.size(); ++i) {
            Vector y = flow(family, x, std::span<const std::size_t>(&i, 1), tau);
            const double d = norm2(sub(y, waypoint));
            if (d < best_dist) {
                best_dist = d;
                best = i;
                best_x = std::move(y);
            }
        }
        out.push_back(best);
        x = std::move(best_x);
    }
    return out;
}

double onehot_code_rate(std::size_t family_size, std::size_t segments, std::size_t blocklength) {
    if (family_size < 1 || blocklength < 1) throw InputError("onehot_code_rate: K and L must be positive");
    return static_cast<double>(segments) / static_cast<double>(blocklength) *
           std::log2(static_cast<double>(family_size));
}

SimplexCode simplex_compress(const SourceFamily& family, std::span<const double> x_t,
                             std::span<const double> target_dx) {
    require_state(family, x_t, "simplex_compress");
    if (target_dx.size() != family.dimension()) throw StructuralError("simplex_compress: target size mismatch");
    require_finite(target_dx, "simplex_compress target");
    const std::size_t k = family.size();

    SimplexCode code;
    if (std::all_of(target_dx.begin(), target_dx.end(), [](double v) { return v == 0.0; })) {
        code.p.assign(k, 1.0 / static_cast<double>(k));
        code.z = 0.0;
        return code;
    }
    const Vector ones(k, 1.0);
    const LpSolution sol = solve_lp(family.field_matrix(x_t), target_dx, ones);
    const double z = std::accumulate(sol.x.begin(), sol.x.end(), 0.0);
    code.z = z;
    code.p.resize(k);
    for (std::size_t i = 0; i < k; ++i) code.p[i] = sol.x[i] / z;
    return code;
}

SimplexCode simplex_compress(const SourceFamily& family, std::span<const double> target_dx) {
    if (!family.all_constant()) throw InputError("simplex_compress: state required for non-constant fields");
    const Vector origin(family.dimension(), 0.0);
    return simplex_compress(family, origin, target_dx);
}

Vector simplex_decompress(const SourceFamily& family, std::span<const double> x_t, const SimplexCode& code) {
    require_state(family, x_t, "simplex_decompress");
    if (code.p.size() != family.size()) throw StructuralError("simplex_decompress: code length != K");
    Vector dx(family.dimension(), 0.0);
    if (code.z == 0.0) return dx;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (code.p[i] == 0.0) continue;
        axpy(code.z * code.p[i], family.evaluate(i, x_t), dx);
    }
    return dx;
}

IntegerCode integer_quantize(const SimplexCode& code, std::size_t resolution) {
    if (resolution < 1) throw InputError("integer_quantize: resolution must be >= 1");
    const std::size_t k = code.p.size();
    if (k == 0) throw InputError("integer_quantize: empty code");
    const auto n = static_cast<double>(resolution);

    IntegerCode out{std::vector<std::size_t>(k, 0), resolution};
    std::vector<double> frac(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double share = std::max(0.0, code.p[i]) * n;
        const double fl = std::floor(share);
        out.counts[i] = static_cast<std::size_t>(fl);
        frac[i] = share - fl;
        assigned += out.counts[i];
    }
    // p sums to 1 only within rounding; never hand out more than N.
    while (assigned > resolution) {
        const auto it = std::max_element(out.counts.begin(), out.counts.end());
        --*it;
        --assigned;
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&frac](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t r = 0; assigned < resolution; ++r, ++assigned) ++out.counts[order[r % k]];
    return out;
}

IntegerCode sample_multinomial(std::span<const double> p, std::size_t resolution, const CounterRng& rng) {
    if (p.empty()) throw InputError("sample_multinomial: empty probability vector");
    std::vector<double> cumulative(p.size());
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0)) throw InputError("sample_multinomial: negative probability");
        acc += p[i];
        cumulative[i] = acc;
        if (p[i] > 0.0) last_positive = i;
    }
    if (!(acc > 0.0)) throw InputError("sample_multinomial: probabilities sum to zero");

    IntegerCode out{std::vector<std::size_t>(p.size(), 0), resolution};
    for (std::size_t draw = 0; draw < resolution; ++draw) {
        const double u = rng.uniform(draw) * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx > last_positive) idx = last_positive;
        ++out.counts[idx];
    }
    return out;
}

double integer_code_log2_count(std::size_t family_size, std::size_t resolution) {
    if (family_size < 1) throw InputError("integer_code_log2_count: K must be positive");
    const auto n = static_cast<double>(resolution);
    const auto k = static_cast<double>(family_size);
    return (std::lgamma(n + k) - std::lgamma(k) - std::lgamma(n + 1.0)) / std::log(2.0);
}

EmulationCodebook build_codebook(const TrajectoryDataset& data, const SourceFamily& family, Execution exec) {
    data.validate();
    if (data.dimension() != family.dimension())
        throw StructuralError("emulate: dataset dimension " + std::to_string(data.dimension()) +
                              " != family dimension " + std::to_string(family.dimension()));
    const std::size_t trials = data.trial_count();
    const std::size_t steps = data.step_count();
    const std::size_t k = family.size();

    struct Slot {
        SimplexCode code;
        bool feasible = false;
    };
    std::vector<Slot> slots(trials * steps);
    std::vector<std::exception_ptr> failures(slots.size());
    auto compress_one = [&](std::size_t idx) {
        const std::size_t step = idx / trials;
        const std::size_t trial = idx % trials;
        try {
            const Vector& x = data.trials[trial][step];
            slots[idx].code = simplex_compress(family, x, data.increment(trial, step));
            slots[idx].feasible = true;
        } catch (const Infeasible&) {
            slots[idx].feasible = false;
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    };
    const auto count = static_cast<std::ptrdiff_t>(slots.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < count; ++i) compress_one(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) compress_one(static_cast<std::size_t>(i));
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    EmulationCodebook codes;
    codes.dt = data.dt;
    codes.x0.assign(data.dimension(), 0.0);
    for (const auto& tr : data.trials) axpy(1.0, tr.front(), codes.x0);
    for (double& v : codes.x0) v /= static_cast<double>(trials);

    codes.p.assign(steps, Vector(k, 0.0));
    codes.z.assign(steps, 0.0);
    codes.feasible.assign(steps, 0);
    for (std::size_t step = 0; step < steps; ++step) {
        std::size_t used = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            const Slot& s = slots[step * trials + trial];
            if (!s.feasible) {
                ++codes.infeasible;
                continue;
            }
            ++used;
            axpy(1.0, s.code.p, codes.p[step]);
            codes.z[step] += s.code.z;
        }
        if (used == 0) throw Infeasible("emulate: no feasible increment at step " + std::to_string(step));
        for (double& v : codes.p[step]) v /= static_cast<double>(used);
        codes.z[step] /= static_cast<double>(used);
        codes.feasible[step] = used;
    }
    return codes;
}

Trajectory emulate_path(const EmulationCodebook& codes, const SourceFamily& family, const EmulationOptions& options,
                        std::uint32_t path) {
    if (options.resolution < 1) throw InputError("emulate: resolution must be >= 1");
    if (codes.x0.size() != family.dimension()) throw StructuralError("emulate: codebook/family dimension mismatch");
    const auto n = static_cast<double>(options.resolution);
    Trajectory out;
    out.reserve(codes.p.size() + 1);
    out.push_back(codes.x0);
    SimplexCode code;
    code.p.resize(family.size());
    for (std::size_t step = 0; step < codes.p.size(); ++step) {
        const CounterRng rng(options.seed, static_cast<std::uint32_t>(step), path);
        const IntegerCode counts = sample_multinomial(codes.p[step], options.resolution, rng);
        for (std::size_t i = 0; i < family.size(); ++i) code.p[i] = static_cast<double>(counts.counts[i]) / n;
        code.z = options.total_time_is_dt ? codes.dt : codes.z[step];
        Vector next = out.back();
        axpy(1.0, simplex_decompress(family, out.back(), code), next);
        out.push_back(std::move(next));
    }
    return out;
}

TrajectoryDataset emulate_paths(const EmulationCodebook& codes, const SourceFamily& family,
                                const EmulationOptions& options, std::size_t paths) {
    if (paths < 1) throw InputError("emulate: paths must be >= 1");
    TrajectoryDataset out;
    out.dt = codes.dt;
    out.trials.resize(paths);
    std::vector<std::exception_ptr> failures(paths);
    auto run = [&](std::size_t i) {
        try {
            out.trials[i] = emulate_path(codes, family, options, static_cast<std::uint32_t>(i));
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };
    const auto count = static_cast<std::ptrdiff_t>(paths);
    if (options.exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) run(static_cast<std::size_t>(i));
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

EmulationResult emulate(const TrajectoryDataset& data, const SourceFamily& family, const EmulationOptions& options) {
    const EmulationCodebook codes = build_codebook(data, family, options.exec);
    EmulationResult result;
    result.trajectory.dt = data.dt;
    result.trajectory.trials.push_back(emulate_path(codes, family, options, 0));
    result.infeasible = codes.infeasible;
    return result;
}

IncrementStatistics increment_statistics(const TrajectoryDataset& data) {
    data.validate();
    const std::size_t trials = data.trial_count();
    const std::size_t steps = data.step_count();
    const std::size_t n = data.dimension();
    IncrementStatistics st;
    st.trials = trials;
    st.mean.assign(steps, Vector(n, 0.0));
    st.covariance.assign(steps, Matrix(n, n));
    for (std::size_t k = 0; k < steps; ++k) {
        std::vector<Vector> inc(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            inc[i] = data.increment(i, k);
            axpy(1.0 / static_cast<double>(trials), inc[i], st.mean[k]);
        }
        if (trials < 2) continue;
        Matrix& c = st.covariance[k];
        for (const auto& d : inc)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) c(a, b) += (d[a] - st.mean[k][a]) * (d[b] - st.mean[k][b]);
        c *= 1.0 / static_cast<double>(trials - 1);
    }
    return st;
}

StatisticsComparison compare_increment_statistics(const IncrementStatistics& reference,
                                                  const IncrementStatistics& candidate, double z) {
    const std::size_t steps = reference.mean.size();
    if (candidate.mean.size() != steps) throw StructuralError("compare_increment_statistics: step counts differ");
    if (steps == 0) throw InputError("compare_increment_statistics: no steps");
    const std::size_t n = reference.mean.front().size();

    auto gap_in_se = [](double gap, double se) {
        if (se > 0.0) return std::abs(gap) / se;
        return std::abs(gap) <= 1e-12 ? 0.0 : INFINITY;
    };
    const auto la = static_cast<double>(reference.trials);
    const auto lb = static_cast<double>(candidate.trials);

    StatisticsComparison out;
    std::size_t mean_ok = 0;
    std::size_t cov_ok = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const Matrix& ca = reference.covariance[k];
        const Matrix& cb = candidate.covariance[k];
        double worst_mean = 0.0;
        double worst_cov = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const double se = std::sqrt(ca(a, a) / la + cb(a, a) / lb);
            worst_mean = std::max(worst_mean, gap_in_se(reference.mean[k][a] - candidate.mean[k][a], se));
            for (std::size_t b = a; b < n; ++b) {
                const double va = la > 1 ? (ca(a, a) * ca(b, b) + ca(a, b) * ca(a, b)) / (la - 1.0) : 0.0;
                const double vb = lb > 1 ? (cb(a, a) * cb(b, b) + cb(a, b) * cb(a, b)) / (lb - 1.0) : 0.0;
                worst_cov = std::max(worst_cov, gap_in_se(ca(a, b) - cb(a, b), std::sqrt(va + vb)));
            }
        }
        out.max_mean_z = std::max(out.max_mean_z, worst_mean);
        out.max_cov_z = std::max(out.max_cov_z, worst_cov);
        if (worst_mean <= z) ++mean_ok;
        if (worst_cov <= z) ++cov_ok;
    }
    out.mean_pass_fraction = static_cast<double>(mean_ok) / static_cast<double>(steps);
    out.cov_pass_fraction = static_cast<double>(cov_ok) / static_cast<double>(steps);
    return out;
}

}  // namespace sysrate
