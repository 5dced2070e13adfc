#include "sysrate/dataset.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "sysrate/errors.hpp"

namespace sysrate {

Vector TrajectoryDataset::increment(std::size_t trial, std::size_t step) const {
    const Trajectory& tr = trials.at(trial);
    return sub(tr.at(step + 1), tr.at(step));
}

void TrajectoryDataset::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dataset: dt must be positive and finite");
    if (trials.empty()) throw InputError("dataset: no trials");
    const std::size_t len = trials.front().size();
    if (len < 2) throw InputError("dataset: each trial needs at least two samples");
    const std::size_t n = trials.front().front().size();
    if (n == 0) throw InputError("dataset: zero-dimensional states");
    for (const auto& tr : trials) {
        if (tr.size() != len) throw InputError("dataset: trials have different lengths");
        for (const auto& x : tr) {
            if (x.size() != n) throw InputError("dataset: inconsistent state dimension");
            require_finite(x, "dataset");
        }
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

void write_dataset_csv(std::ostream& out, const TrajectoryDataset& data) {
    data.validate();
    out << "trial,k,t";
    for (std::size_t i = 0; i < data.dimension(); ++i) out << ",x" << (i + 1);
    out << '\n';
    for (std::size_t trial = 0; trial < data.trial_count(); ++trial) {
        const Trajectory& tr = data.trials[trial];
        for (std::size_t k = 0; k < tr.size(); ++k) {
            out << trial << ',' << k << ',' << format_double(static_cast<double>(k) * data.dt);
            for (double v : tr[k]) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

void write_dataset_csv(const std::string& path, const TrajectoryDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    write_dataset_csv(out, data);
    if (!out) throw InputError("write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError("dataset CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

}  // namespace

TrajectoryDataset read_dataset_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line.front() != '#') break;
    }
    const auto header = split_csv(line);
    if (header.size() < 4 || header[0] != "trial" || header[1] != "k" || header[2] != "t")
        throw InputError("dataset CSV: expected header 'trial,k,t,x1,...'");
    const std::size_t n = header.size() - 3;

    std::map<std::size_t, std::vector<std::pair<double, Vector>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw InputError("dataset CSV line " + std::to_string(line_no) + ": wrong column count");
        const auto trial = static_cast<std::size_t>(parse_double(cells[0], line_no));
        const auto k = static_cast<std::size_t>(parse_double(cells[1], line_no));
        auto& tr = rows[trial];
        if (k != tr.size())
            throw InputError("dataset CSV line " + std::to_string(line_no) + ": rows must be sorted by (trial, k)");
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = parse_double(cells[3 + i], line_no);
        tr.emplace_back(parse_double(cells[2], line_no), std::move(x));
    }
    if (rows.empty()) throw InputError("dataset CSV: no data rows");

    TrajectoryDataset data;
    std::size_t expect = 0;
    for (auto& [trial, samples] : rows) {
        if (trial != expect++) throw InputError("dataset CSV: trial indices must be contiguous from 0");
        Trajectory tr;
        tr.reserve(samples.size());
        for (auto& s : samples) tr.push_back(std::move(s.second));
        data.trials.push_back(std::move(tr));
    }
    const auto& first = rows.begin()->second;
    if (first.size() < 2) throw InputError("dataset CSV: trials need at least two samples");
    data.dt = first[1].first - first[0].first;
    data.validate();
    return data;
}

TrajectoryDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open dataset '" + path + "'");
    return read_dataset_csv(in);
}

}  // namespace sysrate
