#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

#include "sysrate/dataset.hpp"
#include "sysrate/linalg.hpp"

using namespace sysrate;
namespace fs = std::filesystem;

namespace {

const fs::path work = fs::path(SYSRATE_TEST_TMP) / "cli";
const std::string data_dir = SYSRATE_DATA;

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    fs::create_directories(work);
    const fs::path log = work / "stdout.txt";
    const std::string cmd = std::string(SYSRATE_CLI) + " " + args + " > " + log.string() + " 2> " +
                            (work / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1,
            {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}};
}

fs::path write(const std::string& name, const std::string& text) {
    fs::create_directories(work);
    const fs::path p = work / name;
    std::ofstream(p) << text;
    return p;
}

double field(const std::string& line, const std::string& key) {
    const auto pos = line.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(line.substr(pos + key.size() + 1));
}

}  // namespace

TEST_CASE("rdf-curve") {
    const auto cfg = write("one.json", R"({"system": "stable", "grid": {"min": 0.5, "max": 0.5, "points": 1}})");
    const auto out = work / "one.csv";
    const Run r = run("rdf-curve --config " + cfg.string() + " --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("points=1") != std::string::npos);
    std::ifstream in(out);
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == 3);

    const Run unstable = run("rdf-curve --config " + data_dir + "/configs/unstable_curve.json --out " +
                             (work / "u.csv").string());
    CHECK(unstable.code == 0);
    CHECK(unstable.out.find("asymptote_bits=none") != std::string::npos);
}

TEST_CASE("min-rate") {
    const Run stable = run("min-rate --config " + data_dir + "/configs/stable_min_rate.json");
    CHECK(stable.code == 0);
    CHECK(stable.out.find("not_needed") != std::string::npos);

    const Run bm = run("min-rate --config " + data_dir + "/configs/brownian_min_rate.json");
    CHECK(bm.code == 0);
    const double want = 1.0 / (0.01 * std::exp2(16.0));
    CHECK(std::abs(field(bm.out, "fs_min") - want) <= 1e-6 * want);

    const Run saddle = run("min-rate --config " + data_dir + "/configs/unstable_min_rate.json --capacity 8");
    CHECK(saddle.code == 0);
    CHECK(field(saddle.out, "fs_min") > 0.0);

    const auto hard = write("hard.json", R"({"system": {"A": [[0]], "N": [[1e6]]}, "distortion": 1e-12,
        "capacity_bits": 1})");
    const Run inf = run("min-rate --config " + hard.string());
    CHECK(inf.code == 3);
    CHECK(inf.out.find("infeasible") != std::string::npos);

    const auto no_c = write("noc.json", R"({"system": "stable"})");
    CHECK(run("min-rate --config " + no_c.string()).code == 2);
}

TEST_CASE("sample") {
    const auto cfg = write("quiet.json", R"({"system": {"A": [[-1, 0], [0, -2]], "N": [[0, 0], [0, 0]]},
        "sample": {"x0": [1, 1], "dt": 0.1, "steps": 10, "trials": 2}})");
    const auto out = work / "quiet.csv";
    const Run r = run("sample --config " + cfg.string() + " --seed 1 --out " + out.string());
    CHECK(r.code == 0);
    const auto d = read_dataset_csv(out.string());
    REQUIRE(d.trial_count() == 2);
    REQUIRE(d.step_count() == 10);
    for (std::size_t k = 0; k <= 10; ++k) {
        CHECK(d.trials[1][k][0] == doctest::Approx(std::exp(-0.1 * k)).epsilon(1e-13));
        CHECK(d.trials[1][k][1] == doctest::Approx(std::exp(-0.2 * k)).epsilon(1e-13));
    }
    CHECK(run("sample --config " + cfg.string() + " --out " + out.string()).code == 1);
    CHECK(run("sample --config " + data_dir + "/configs/stable_curve.json --seed 1 --out " + out.string()).code == 2);
}

TEST_CASE("emulate") {
    TrajectoryDataset line{0.01, {}};
    for (int t = 0; t < 3; ++t) {
        Trajectory tr{Vector{0.5, -0.5}};
        for (int k = 0; k < 10; ++k) tr.push_back(Vector{tr.back()[0] - 0.02, tr.back()[1] + 0.02});
        line.trials.push_back(tr);
    }
    const auto ds = work / "line.csv";
    write_dataset_csv(ds.string(), line);
    const auto out = work / "line_emu.csv";
    const Run r = run("emulate " + ds.string() + " " + data_dir + "/family_grid24.json --seed 5 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(field(r.out, "infeasible") == 0.0);
    CHECK(field(r.out, "max_mean_z") == 0.0);
    const auto emu = read_dataset_csv(out.string());
    REQUIRE(emu.trial_count() == 1);
    for (std::size_t k = 0; k <= 10; ++k) {
        CHECK(std::abs(emu.trials[0][k][0] - line.trials[0][k][0]) <= 1e-12);
        CHECK(std::abs(emu.trials[0][k][1] - line.trials[0][k][1]) <= 1e-12);
    }

    const auto empty = write("empty.csv", "trial,k,t,x1,x2\n");
    CHECK(run("emulate " + empty.string() + " " + data_dir + "/family_grid24.json --seed 5 --out " +
              (work / "e.csv").string())
              .code == 2);
    const auto fam3 = write("fam3.json", "[[1, 0, 0], [0, 1, 0]]");
    CHECK(run("emulate " + ds.string() + " " + fam3.string() + " --seed 5 --out " + (work / "e.csv").string()).code ==
          2);
    CHECK(run("emulate " + ds.string() + " /nonexistent.json --seed 5 --out " + (work / "e.csv").string()).code == 1);
}

TEST_CASE("usage errors") {
    CHECK(run("").code == 1);
    CHECK(run("bogus").code == 1);
    CHECK(run("--help").code == 0);
}
