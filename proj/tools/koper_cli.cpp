// Command-line front end for the stochastic Koper toolkit.
//
// Exit codes: 0 success, 2 config parse error, 3 precondition violation,
// 4 numerical failure.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "koper/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    long seed = -1;
    double dt = 0.0;
    bool plot = true;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

koper::ExperimentConfig build_config(const CliOptions& opt,
                                     const std::string& default_preset) {
    std::string text;
    if (!opt.config_path.empty()) {
        text = read_file(opt.config_path);
    } else {
        text = "preset = " + default_preset + "\n";
    }
    koper::ExperimentConfig cfg = koper::parse_config(text);
    if (opt.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.dt > 0.0) cfg.dt = opt.dt;
    if (!opt.out_dir.empty()) {
        cfg.out_dir = opt.out_dir;
    } else if (opt.config_path.empty() || cfg.out_dir == "out") {
        if (const char* env = std::getenv("KOPER_OUT_DIR")) cfg.out_dir = env;
    }
    cfg.plot = cfg.plot && opt.plot;
    return cfg;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "run configuration file");
    cmd->add_option("--seed", opt.seed, "RNG seed override");
    cmd->add_option("--out", opt.out_dir, "output directory override");
    cmd->add_option("--dt", opt.dt, "time step override");
    cmd->add_flag("--plot,!--no-plot", opt.plot, "emit SVG plots");
}

int run(const CliOptions& opt, const std::string& preset, bool analyze) {
    koper::ExperimentConfig cfg = build_config(opt, preset);
    koper::ArtifactSet set = analyze ? koper::run_analyze_equilibrium(cfg)
                                     : koper::run_preset(cfg);
    for (const auto& f : set.files) std::cout << f.string() << '\n';
    std::cout << set.manifest.string() << '\n';
    for (const auto& n : set.notes) std::cerr << "note: " << n << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic Koper fast-slow system toolkit"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* desc;
        const char* preset;
        bool analyze;
    };
    const Sub subs[] = {
        {"simulate", "integrate the stochastic system", "custom", false},
        {"fig1", "stability-index sweep", "fig1", false},
        {"fig2", "noise-intensity sweep", "fig2", false},
        {"fig3", "deterministic trajectory", "fig3", false},
        {"manifold", "random slow manifold graph", "manifold", false},
        {"tracking", "exponential tracking measurement", "tracking", false},
        {"analyze-equilibrium", "equilibrium and eigenvalue report", "custom", true},
    };

    CliOptions opt;
    std::string chosen_preset;
    bool analyze = false;
    for (const Sub& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.desc);
        add_common_flags(cmd, opt);
        cmd->callback([&, s]() {
            chosen_preset = s.preset;
            analyze = s.analyze;
        });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        return run(opt, chosen_preset, analyze);
    } catch (const koper::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const koper::ContractionError& e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return 3;
    } catch (const koper::BlowUpError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    }
}
