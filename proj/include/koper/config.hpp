// Flat `key = value` run configuration with canonical serialization.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "koper/model.hpp"

namespace koper {

enum class Preset { fig1, fig2, fig3, manifold, tracking, custom };

std::string preset_name(Preset p);
Preset preset_from_name(const std::string& name);

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line) + ": " + what),
          line_number(line) {}
    int line_number;
};

// Declarative description of a run. Defaults are preset-dependent and are
// filled during parsing, so parse(serialize(c)) == c.
struct ExperimentConfig {
    Preset preset = Preset::custom;
    std::uint64_t seed = 1;
    double t_end = 100.0;
    double dt = 1e-3;
    std::string out_dir = "out";
    bool plot = true;

    KoperParams params;

    // Initial state for trajectory presets.
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;

    // Slow-variable grid for the manifold preset.
    double y_min = 0.8, y_max = 1.2;
    double z_min = 0.8, z_max = 1.2;
    int n_y = 11, n_z = 11;

    // Lyapunov-Perron options.
    double lp_dt = 1e-4;
    double tol = 1e-8;
    double trunc_tol = 1e-8;

    // Tracking preset: initial fast-direction offset.
    double track_offset = 0.5;

    // Path increment cap: < 0 lets the preset decide, 0 disables, > 0 caps.
    double jump_cap = -1.0;
    // Tamed Euler drift: -1 preset default, 0 off, 1 on.
    int tamed = -1;

    bool operator==(const ExperimentConfig&) const = default;
};

inline bool operator==(const KoperParams& a, const KoperParams& b) {
    return a.k == b.k && a.lambda0 == b.lambda0 && a.lambda1 == b.lambda1 &&
           a.eps == b.eps && a.eps_hat == b.eps_hat && a.sigma == b.sigma &&
           a.alpha == b.alpha && a.K == b.K && a.gamma == b.gamma &&
           a.cutoff_radius == b.cutoff_radius;
}

// Parses `key = value` lines with `#` comments. Unknown keys, malformed
// values, and a missing preset raise ConfigError with the line number.
ExperimentConfig parse_config(const std::string& text);

// Canonical form: every key, fixed order. Re-parses to an equal config.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace koper
