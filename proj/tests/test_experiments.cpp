#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "koper/experiments.hpp"
#include "koper/slow_manifold.hpp"

using namespace koper;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("koper_exp_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    Csv csv;
    std::string line;
    REQUIRE(std::getline(in, line));
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) csv.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream r(line);
        std::vector<double> row;
        while (std::getline(r, cell, ',')) row.push_back(std::stod(cell));
        csv.rows.push_back(row);
    }
    return csv;
}

std::map<std::string, std::string> read_kv(const fs::path& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// Strip the commented header lines so the manifest parses as a config.
ExperimentConfig config_from_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    REQUIRE(in.good());
    std::ostringstream body;
    std::string line;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#') body << line << '\n';
    return parse_config(body.str());
}

void check_svg(const fs::path& file) {
    std::string text = slurp(file);
    REQUIRE(!text.empty());
    CHECK(text.find("<svg") != std::string::npos);
    // The document closes its root element and balances every non-root tag
    // it opens (our writers use self-closing elements plus <text>...</text>).
    CHECK(text.rfind("</svg>") != std::string::npos);
    auto count = [&](const std::string& needle) {
        std::size_t n = 0, pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            ++n;
            pos += needle.size();
        }
        return n;
    };
    CHECK(count("<text") == count("</text>"));
    CHECK(count("<svg") == count("</svg>"));
}

std::size_t count_with_ext(const ArtifactSet& set, const std::string& ext) {
    return static_cast<std::size_t>(
        std::count_if(set.files.begin(), set.files.end(),
                      [&](const fs::path& f) { return f.extension() == ext; }));
}

void check_all_inside(const ArtifactSet& set, const fs::path& dir) {
    for (const fs::path& f : set.files) {
        CHECK(fs::exists(f));
        CHECK(f.parent_path() == dir);
    }
    CHECK(set.manifest.parent_path() == dir);
}

// Re-run a preset from its manifest into a fresh directory and require
// byte-identical CSV outputs.
void check_manifest_rerun(const ArtifactSet& set, const std::string& tag) {
    ExperimentConfig c = config_from_manifest(set.manifest);
    fs::path dir2 = fresh_dir(tag + "_rerun");
    c.out_dir = dir2.string();
    ArtifactSet again = run_preset(c);
    std::size_t csvs = 0;
    for (const fs::path& f : set.files) {
        if (f.extension() != ".csv") continue;
        ++csvs;
        CHECK(slurp(f) == slurp(dir2 / f.filename()));
    }
    CHECK(csvs == count_with_ext(again, ".csv"));
    fs::remove_all(dir2);
}

}  // namespace

TEST_CASE("fig1 preset artifacts and bounds") {
    fs::path dir = fresh_dir("fig1");
    ExperimentConfig c = parse_config("preset = fig1\nseed = 1\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_fig1(c);

    CHECK(count_with_ext(set, ".csv") == 3);
    CHECK(count_with_ext(set, ".svg") == 3);
    CHECK(fs::exists(set.manifest));
    check_all_inside(set, dir);

    // Slow variables stay bounded for the alpha=1.6 run.
    Csv traj = read_csv(dir / "fig1_alpha1.6.csv");
    REQUIRE(traj.header == std::vector<std::string>{"t", "x", "y", "z"});
    for (const auto& row : traj.rows) {
        CHECK(std::abs(row[2]) <= 10.0);
        CHECK(std::abs(row[3]) <= 10.0);
    }
    for (const fs::path& f : set.files)
        if (f.extension() == ".svg") check_svg(f);

    check_manifest_rerun(set, "fig1");
    fs::remove_all(dir);
}

TEST_CASE("fig2 preset: noise sweep ordering and deviation flag") {
    fs::path dir = fresh_dir("fig2");
    ExperimentConfig c = parse_config("preset = fig2\nseed = 1\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_fig2(c);

    CHECK(count_with_ext(set, ".csv") == 3);
    CHECK(count_with_ext(set, ".svg") == 3);

    auto x_range = [&](const std::string& name) {
        Csv traj = read_csv(dir / name);
        double lo = 1e300, hi = -1e300;
        for (const auto& row : traj.rows) {
            lo = std::min(lo, row[1]);
            hi = std::max(hi, row[1]);
        }
        return hi - lo;
    };
    CHECK(x_range("fig2_sigma0.1.csv") < x_range("fig2_sigma0.8.csv"));

    // The alpha=1 figure choice is outside (1,2) and must be flagged.
    std::string manifest = slurp(set.manifest);
    CHECK(manifest.find("alpha outside (1,2)") != std::string::npos);
    CHECK(manifest.find("library_version") != std::string::npos);

    check_manifest_rerun(set, "fig2");
    fs::remove_all(dir);
}

TEST_CASE("fig3 preset reproduces the deterministic run") {
    fs::path dir = fresh_dir("fig3");
    ExperimentConfig c = parse_config("preset = fig3\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_fig3(c);

    CHECK(count_with_ext(set, ".csv") == 1);
    CHECK(count_with_ext(set, ".svg") == 2);  // 3-D path and time series

    Csv traj = read_csv(dir / "fig3_trajectory.csv");
    double xmax5 = -1e300;
    double t_y = -1.0, t_z = -1.0;
    for (const auto& row : traj.rows) {
        if (row[0] <= 5.0) xmax5 = std::max(xmax5, row[1]);
        if (t_y < 0.0 && row[2] > 0.9) t_y = row[0];
        if (t_z < 0.0 && row[3] > 0.9) t_z = row[0];
    }
    CHECK(xmax5 >= 1.8);
    CHECK(xmax5 <= 2.2);
    const auto& last = traj.rows.back();
    CHECK(std::abs(last[1] - 1.0) <= 1e-2);
    CHECK(std::abs(last[2] - 1.0) <= 1e-2);
    CHECK(std::abs(last[3] - 1.0) <= 1e-2);
    // y reaches its equilibrium neighborhood before z does.
    CHECK(t_y > 0.0);
    CHECK(t_z > 0.0);
    CHECK(t_y < t_z);

    check_manifest_rerun(set, "fig3");
    fs::remove_all(dir);
}

TEST_CASE("manifold preset emits graph, heatmap, and metadata") {
    fs::path dir = fresh_dir("manifold");
    ExperimentConfig c = parse_config(
        "preset = manifold\nseed = 1\nn_y = 3\nn_z = 3\nlp_dt = 1e-3\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_manifold(c);

    Csv g = read_csv(dir / "manifold.csv");
    REQUIRE(g.header == std::vector<std::string>{"y0", "z0", "h"});
    CHECK(g.rows.size() == 9);
    for (const auto& row : g.rows) CHECK(std::isfinite(row[2]));

    auto meta = read_kv(dir / "manifold_meta.txt");
    CHECK(std::stod(meta.at("rho")) < 1.0);
    CHECK(std::stod(meta.at("lip_measured")) <=
          1.1 * std::stod(meta.at("lip_bound")));
    CHECK(meta.at("failed_nodes") == "0");
    CHECK(std::stod(meta.at("K_est")) == 13.0);
    check_svg(dir / "manifold.svg");

    check_manifest_rerun(set, "manifold");
    fs::remove_all(dir);
}

TEST_CASE("tracking preset reports a negative fitted rate") {
    fs::path dir = fresh_dir("tracking");
    ExperimentConfig c = parse_config("preset = tracking\nseed = 21\nlp_dt = 1e-3\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_tracking(c);

    auto report = read_kv(dir / "tracking_report.txt");
    CHECK(report.at("fit_valid") == "true");
    CHECK(std::stod(report.at("c2_fit")) < 0.0);

    Csv series = read_csv(dir / "tracking.csv");
    REQUIRE(series.header == std::vector<std::string>{"t", "log_distance"});
    CHECK(series.rows.size() > 100);

    check_manifest_rerun(set, "tracking");
    fs::remove_all(dir);
}

TEST_CASE("contraction-violating config fails cleanly with no partial output") {
    fs::path dir = fresh_dir("violate");
    ExperimentConfig c = parse_config(
        "preset = manifold\nseed = 1\nn_y = 2\nn_z = 2\nlp_dt = 1e-3\n"
        "K = 13\ngamma = 1\n");  // gamma < K(1 - 2 eps): rho > 1
    c.out_dir = dir.string();
    CHECK_THROWS_AS(run_manifold(c), ContractionError);
    CHECK_FALSE(fs::exists(dir / "manifold.csv"));
    CHECK_FALSE(fs::exists(dir / "manifest.txt"));
    fs::remove_all(dir);
}

TEST_CASE("custom simulate preset and equilibrium analysis") {
    fs::path dir = fresh_dir("custom");
    ExperimentConfig c = parse_config("preset = custom\nseed = 9\nt_end = 5\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_simulate(c);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "trajectory.svg"));
    check_manifest_rerun(set, "custom");

    ArtifactSet eq = run_analyze_equilibrium(c);
    Csv rows = read_csv(dir / "equilibrium.csv");
    REQUIRE(rows.header.size() == 10);
    REQUIRE(rows.rows.size() == 3);  // eps in {0.01, 0.05, 0.1}
    for (const auto& row : rows.rows) {
        double eps = row[0];
        CHECK(std::abs(row[1] - (-3.0 * eps)) <= 1e-12);          // trace
        CHECK(std::abs(row[2] - (-5.0 * eps * eps)) <= 1e-12);    // det
        CHECK(row[9] == 1.0);                                     // stable
    }
    CHECK(eq.files.size() == 1);
    fs::remove_all(dir);
}

TEST_CASE("plot flag suppresses SVG artifacts") {
    fs::path dir = fresh_dir("noplot");
    ExperimentConfig c = parse_config("preset = fig3\nplot = false\nt_end = 1\n");
    c.out_dir = dir.string();
    ArtifactSet set = run_fig3(c);
    CHECK(count_with_ext(set, ".svg") == 0);
    CHECK(count_with_ext(set, ".csv") == 1);
    fs::remove_all(dir);
}

#ifdef KOPER_CLI_PATH
TEST_CASE("command-line interface exit codes") {
    fs::path dir = fresh_dir("cli");
    fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "preset = custom\nseed = 3\nt_end = 1\nplot = false\n";
    }
    std::string base = std::string(KOPER_CLI_PATH);
    auto run = [&](const std::string& args) {
        int status = std::system((base + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("simulate --config " + cfg.string() + " --out " + (dir / "ok").string()) == 0);
    CHECK(fs::exists(dir / "ok" / "trajectory.csv"));

    fs::path bad = dir / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "preset = custom\nwhat = 1\n";
    }
    CHECK(run("simulate --config " + bad.string()) == 2);  // parse error

    fs::path violate = dir / "violate.cfg";
    {
        std::ofstream out(violate);
        out << "preset = manifold\nn_y = 2\nn_z = 2\nlp_dt = 1e-3\n"
            << "K = 13\ngamma = 1\n";
    }
    CHECK(run("manifold --config " + violate.string() + " --out " +
              (dir / "v").string()) == 3);  // precondition error
    fs::remove_all(dir);
}
#endif
