#include "koper/experiments.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "koper/csv_io.hpp"
#include "koper/rng.hpp"
#include "koper/svg_plot.hpp"

namespace koper {

namespace fs = std::filesystem;

namespace {

void write_manifest(ArtifactSet& set, const ExperimentConfig& config,
                    const std::string& scheme) {
    fs::path file = fs::path(config.out_dir) / "manifest.txt";
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write manifest: " + file.string());
    out << "# library_version: " << kLibraryVersion << '\n';
    out << "# scheme: " << scheme << '\n';
    for (const auto& note : set.notes) out << "# " << note << '\n';
    out << serialize_config(config);
    set.manifest = file;
}

fs::path out_file(const ExperimentConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return fs::path(config.out_dir) / name;
}

// Cap so that a single scaled noise kick moves x by at most 10; keeps the
// explicit scheme stable for figure rendering.
double preset_jump_cap(const ExperimentConfig& config, const KoperParams& p) {
    if (config.jump_cap >= 0.0) return config.jump_cap;
    double kick = p.sigma * std::pow(p.eps, -1.0 / p.alpha);
    return kick > 0.0 ? 10.0 / kick : 0.0;
}

bool preset_tamed(const ExperimentConfig& config, bool preset_default) {
    if (config.tamed < 0) return preset_default;
    return config.tamed != 0;
}

void stochastic_figure_runs(ArtifactSet& set, const ExperimentConfig& config,
                            const std::string& stem, const std::string& sweep_key,
                            const std::vector<double>& sweep_values,
                            KoperParams base) {
    for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        KoperParams p = base;
        if (sweep_key == "alpha") p.alpha = sweep_values[i];
        else p.sigma = sweep_values[i];

        std::ostringstream tag;
        tag << stem << '_' << sweep_key << format_number(sweep_values[i]);
        if (p.alpha <= 1.0 || p.alpha >= 2.0)
            set.notes.push_back("deviation: " + tag.str() +
                                " uses alpha outside (1,2)");
        try {
            std::vector<double> grid = uniform_grid(0.0, config.t_end, config.dt);
            StablePath path = sample_path(p.alpha, grid,
                                          derive_seed(config.seed, i),
                                          preset_jump_cap(config, p));
            Trajectory traj =
                integrate_em(p, {config.x0, config.y0, config.z0}, path,
                             config.t_end, config.dt, preset_tamed(config, true));
            fs::path csv = out_file(config, tag.str() + ".csv");
            write_trajectory_csv(csv, traj);
            set.files.push_back(csv);
            if (config.plot) {
                fs::path svg = out_file(config, tag.str() + ".svg");
                write_path3d_svg(svg, traj, tag.str());
                set.files.push_back(svg);
            }
        } catch (const BlowUpError& e) {
            set.notes.push_back("error: " + tag.str() + " blow-up at t=" +
                                format_number(e.time));
        }
    }
}

}  // namespace

ArtifactSet run_fig1(const ExperimentConfig& config) {
    ArtifactSet set;
    KoperParams base = config.params;
    base.sigma = 0.5;
    base.eps = 0.05;
    stochastic_figure_runs(set, config, "fig1", "alpha", {0.8, 1.6, 1.9}, base);
    write_manifest(set, config, "euler-maruyama");
    return set;
}

ArtifactSet run_fig2(const ExperimentConfig& config) {
    ArtifactSet set;
    KoperParams base = config.params;
    base.alpha = 1.0;  // figure choice; outside the production range
    base.eps = 0.05;
    stochastic_figure_runs(set, config, "fig2", "sigma", {0.1, 0.5, 0.8}, base);
    write_manifest(set, config, "euler-maruyama");
    return set;
}

ArtifactSet run_fig3(const ExperimentConfig& config) {
    ArtifactSet set;
    KoperParams p = config.params;
    p.sigma = 0.0;
    p.eps = 0.05;
    Trajectory traj = integrate_rk4_deterministic(
        p, {config.x0, config.y0, config.z0}, config.t_end, config.dt);
    fs::path csv = out_file(config, "fig3_trajectory.csv");
    write_trajectory_csv(csv, traj);
    set.files.push_back(csv);
    if (config.plot) {
        fs::path svg3d = out_file(config, "fig3_path3d.svg");
        write_path3d_svg(svg3d, traj, "fig3 trajectory");
        set.files.push_back(svg3d);

        std::vector<double> xs, ys, zs;
        for (const State& s : traj.states) {
            xs.push_back(s.x);
            ys.push_back(s.y);
            zs.push_back(s.z);
        }
        fs::path svgts = out_file(config, "fig3_timeseries.svg");
        write_timeseries_svg(svgts, traj.times,
                             {{"x", "#2e8b57", &xs},
                              {"y", "#c0392b", &ys},
                              {"z", "#6a3d9a", &zs}},
                             "fig3 time series");
        set.files.push_back(svgts);
    }
    write_manifest(set, config, "rk4-deterministic");
    return set;
}

namespace {

RandomOdeSetup manifold_setup(const ExperimentConfig& config, double t_max) {
    KoperParams p = resolve_contraction_constants(config.params);
    double T = lp_truncation_horizon(p.eps, p.gamma, config.trunc_tol);
    double t_lo = -(std::ceil(T / config.lp_dt) + 2.0) * config.lp_dt;
    std::vector<double> grid = uniform_grid(t_lo, std::max(t_max, 0.0), config.lp_dt);
    StablePath path = sample_path(p.alpha, grid, config.seed);
    return RandomOdeSetup::make(p, std::move(path));
}

LpOptions lp_options(const ExperimentConfig& config) {
    LpOptions opt;
    opt.dt = config.lp_dt;
    opt.tol = config.tol;
    opt.trunc_tol = config.trunc_tol;
    return opt;
}

}  // namespace

ArtifactSet run_manifold(const ExperimentConfig& config) {
    ArtifactSet set;
    RandomOdeSetup setup = manifold_setup(config, 0.0);
    // Fails with a contraction error before any file is written.
    ManifoldGraph g =
        manifold_graph(setup, config.y_min, config.y_max, config.z_min,
                       config.z_max, config.n_y, config.n_z, lp_options(config));

    fs::path csv = out_file(config, "manifold.csv");
    write_manifold_csv(csv, g);
    set.files.push_back(csv);
    if (config.plot) {
        fs::path svg = out_file(config, "manifold.svg");
        write_heatmap_svg(svg, g, "random slow manifold h(y0,z0)");
        set.files.push_back(svg);
    }
    fs::path meta = out_file(config, "manifold_meta.txt");
    {
        std::ofstream out(meta);
        out << "seed = " << g.seed << '\n'
            << "eps = " << format_number(setup.params.eps) << '\n'
            << "sigma = " << format_number(setup.params.sigma) << '\n'
            << "alpha = " << format_number(setup.params.alpha) << '\n'
            << "K_est = " << format_number(g.K_used) << '\n'
            << "gamma = " << format_number(g.gamma_used) << '\n'
            << "rho = " << format_number(g.rho) << '\n'
            << "lip_measured = " << format_number(g.lip_measured) << '\n'
            << "lip_bound = " << format_number(g.lip_bound) << '\n'
            << "T_trunc = " << format_number(g.T_trunc) << '\n'
            << "dt = " << format_number(config.lp_dt) << '\n'
            << "tol = " << format_number(config.tol) << '\n'
            << "failed_nodes = " << g.failed_nodes.size() << '\n';
    }
    set.files.push_back(meta);
    write_manifest(set, config, "lyapunov-perron");
    return set;
}

ArtifactSet run_tracking(const ExperimentConfig& config) {
    ArtifactSet set;
    RandomOdeSetup setup = manifold_setup(config, config.t_end);
    LpOptions opt = lp_options(config);

    double Y0 = 0.5 * (config.y_min + config.y_max);
    double Z0 = 0.5 * (config.z_min + config.z_max);
    LpResult lp = lp_iterate(setup, Y0, Z0, opt);
    State u_on{lp.h, Y0, Z0};
    State u_off{lp.h + config.track_offset, Y0, Z0};
    TrackingResult tr =
        exponential_tracking(setup, u_on, u_off, config.t_end, config.dt);

    fs::path csv = out_file(config, "tracking.csv");
    write_series_csv(csv, {"t", "log_distance"}, {tr.times, tr.log_distances});
    set.files.push_back(csv);
    fs::path report = out_file(config, "tracking_report.txt");
    {
        std::ofstream out(report);
        out << "c2_fit = " << format_number(tr.c2_fit) << '\n'
            << "fit_valid = " << (tr.fit_valid ? "true" : "false") << '\n'
            << "t_end = " << format_number(config.t_end) << '\n'
            << "offset = " << format_number(config.track_offset) << '\n';
    }
    set.files.push_back(report);
    write_manifest(set, config, "random-ode-rk4");
    return set;
}

ArtifactSet run_simulate(const ExperimentConfig& config) {
    ArtifactSet set;
    KoperParams p = config.params;
    std::vector<double> grid = uniform_grid(0.0, config.t_end, config.dt);
    StablePath path = sample_path(p.alpha, grid, config.seed,
                                  config.jump_cap > 0.0 ? config.jump_cap : 0.0);
    Trajectory traj = integrate_em(p, {config.x0, config.y0, config.z0}, path,
                                   config.t_end, config.dt,
                                   preset_tamed(config, false));
    fs::path csv = out_file(config, "trajectory.csv");
    write_trajectory_csv(csv, traj);
    set.files.push_back(csv);
    if (config.plot) {
        fs::path svg = out_file(config, "trajectory.svg");
        write_path3d_svg(svg, traj, "trajectory");
        set.files.push_back(svg);
    }
    write_manifest(set, config, "euler-maruyama");
    return set;
}

ArtifactSet run_analyze_equilibrium(const ExperimentConfig& config) {
    ArtifactSet set;
    std::vector<double> eps_list = {0.01, 0.05, 0.1};
    bool has = false;
    for (double e : eps_list) has = has || e == config.params.eps;
    if (!has) eps_list.push_back(config.params.eps);

    std::vector<EquilibriumRow> rows;
    for (double eps : eps_list) {
        KoperParams p = config.params;
        p.eps = eps;
        State eq = find_equilibrium(p, {0.9, 0.9, 0.9});
        rows.push_back({eps, classify_equilibrium(jacobian(eq, p))});
    }
    fs::path csv = out_file(config, "equilibrium.csv");
    write_equilibrium_csv(csv, rows);
    set.files.push_back(csv);
    write_manifest(set, config, "newton-cubic-roots");
    return set;
}

ArtifactSet run_preset(const ExperimentConfig& config) {
    switch (config.preset) {
        case Preset::fig1: return run_fig1(config);
        case Preset::fig2: return run_fig2(config);
        case Preset::fig3: return run_fig3(config);
        case Preset::manifold: return run_manifold(config);
        case Preset::tracking: return run_tracking(config);
        case Preset::custom: return run_simulate(config);
    }
    throw std::logic_error("run_preset: unreachable");
}

}  // namespace koper
