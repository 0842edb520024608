#include "koper/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string_view>

namespace koper {

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::fig1: return "fig1";
        case Preset::fig2: return "fig2";
        case Preset::fig3: return "fig3";
        case Preset::manifold: return "manifold";
        case Preset::tracking: return "tracking";
        case Preset::custom: return "custom";
    }
    return "custom";
}

Preset preset_from_name(const std::string& name) {
    for (Preset p : {Preset::fig1, Preset::fig2, Preset::fig3, Preset::manifold,
                     Preset::tracking, Preset::custom})
        if (preset_name(p) == name) return p;
    throw std::invalid_argument("unknown preset: " + name);
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, "malformed number: " + v);
    }
}

long parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, "malformed integer: " + v);
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(line, "malformed flag: " + v);
}

void apply_preset_defaults(ExperimentConfig& c) {
    switch (c.preset) {
        case Preset::fig3:
            c.t_end = 400.0;
            break;
        case Preset::manifold:
            c.params.cutoff_radius = 2.0;
            // Slow grid on the left attracting branch, clear of the cubic's
            // folds, where the graph is single-valued and Lipschitz.
            c.y_min = 1.8;
            c.y_max = 2.8;
            c.z_min = 0.0;
            c.z_max = 1.0;
            break;
        case Preset::tracking:
            c.params.cutoff_radius = 2.0;
            c.y_min = 1.8;
            c.y_max = 2.8;
            c.z_min = 0.0;
            c.z_max = 1.0;
            c.t_end = 5.0;
            break;
        default:
            break;
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    // First pass: find the preset so its defaults apply before overrides.
    ExperimentConfig c;
    bool preset_seen = false;
    bool alpha_set = false;

    std::istringstream pre(text);
    std::string raw;
    int ln = 0;
    while (std::getline(pre, raw)) {
        ++ln;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(ln, "expected 'key = value'");
        if (trim(line.substr(0, eq)) == "preset") {
            try {
                c.preset = preset_from_name(trim(line.substr(eq + 1)));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(ln, e.what());
            }
            preset_seen = true;
        }
    }
    if (!preset_seen) throw ConfigError(0, "missing preset");
    apply_preset_defaults(c);

    std::istringstream in(text);
    ln = 0;
    while (std::getline(in, raw)) {
        ++ln;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.empty()) throw ConfigError(ln, "missing value for key: " + key);

        if (key == "preset") continue;  // handled above
        else if (key == "seed") {
            long s = parse_int(val, ln);
            if (s < 0) throw ConfigError(ln, "seed must be >= 0");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "t_end") c.t_end = parse_double(val, ln);
        else if (key == "dt") c.dt = parse_double(val, ln);
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "plot") c.plot = parse_bool(val, ln);
        else if (key == "k") c.params.k = parse_double(val, ln);
        else if (key == "lambda0") c.params.lambda0 = parse_double(val, ln);
        else if (key == "lambda1") c.params.lambda1 = parse_double(val, ln);
        else if (key == "eps") c.params.eps = parse_double(val, ln);
        else if (key == "eps_hat") c.params.eps_hat = parse_double(val, ln);
        else if (key == "sigma") c.params.sigma = parse_double(val, ln);
        else if (key == "alpha") {
            c.params.alpha = parse_double(val, ln);
            alpha_set = true;
        } else if (key == "K") c.params.K = parse_double(val, ln);
        else if (key == "gamma") c.params.gamma = parse_double(val, ln);
        else if (key == "cutoff_radius") c.params.cutoff_radius = parse_double(val, ln);
        else if (key == "x0") c.x0 = parse_double(val, ln);
        else if (key == "y0") c.y0 = parse_double(val, ln);
        else if (key == "z0") c.z0 = parse_double(val, ln);
        else if (key == "y_min") c.y_min = parse_double(val, ln);
        else if (key == "y_max") c.y_max = parse_double(val, ln);
        else if (key == "z_min") c.z_min = parse_double(val, ln);
        else if (key == "z_max") c.z_max = parse_double(val, ln);
        else if (key == "n_y") c.n_y = static_cast<int>(parse_int(val, ln));
        else if (key == "n_z") c.n_z = static_cast<int>(parse_int(val, ln));
        else if (key == "lp_dt") c.lp_dt = parse_double(val, ln);
        else if (key == "tol") c.tol = parse_double(val, ln);
        else if (key == "trunc_tol") c.trunc_tol = parse_double(val, ln);
        else if (key == "track_offset") c.track_offset = parse_double(val, ln);
        else if (key == "jump_cap") c.jump_cap = parse_double(val, ln);
        else if (key == "tamed") c.tamed = static_cast<int>(parse_int(val, ln));
        else throw ConfigError(ln, "unknown key: " + key);
    }

    if (!(c.t_end > 0.0)) throw ConfigError(0, "t_end must be positive");
    if (!(c.dt > 0.0)) throw ConfigError(0, "dt must be positive");
    if (alpha_set && c.params.sigma > 0.0 &&
        !(c.params.alpha > 1.0 && c.params.alpha < 2.0))
        throw ConfigError(0, "alpha must be in (1,2) when sigma > 0");
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    // Shortest representation that parses back to the identical double, so
    // serialization is a canonical form and round trips exactly.
    auto num = [&](const char* key, double v) {
        char buf[40];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out << key << " = " << std::string_view(buf, res.ptr) << '\n';
    };
    out << "preset = " << preset_name(c.preset) << '\n';
    out << "seed = " << c.seed << '\n';
    num("t_end", c.t_end);
    num("dt", c.dt);
    out << "out_dir = " << c.out_dir << '\n';
    out << "plot = " << (c.plot ? "true" : "false") << '\n';
    num("k", c.params.k);
    num("lambda0", c.params.lambda0);
    num("lambda1", c.params.lambda1);
    num("eps", c.params.eps);
    num("eps_hat", c.params.eps_hat);
    num("sigma", c.params.sigma);
    num("alpha", c.params.alpha);
    num("K", c.params.K);
    num("gamma", c.params.gamma);
    num("cutoff_radius", c.params.cutoff_radius);
    num("x0", c.x0);
    num("y0", c.y0);
    num("z0", c.z0);
    num("y_min", c.y_min);
    num("y_max", c.y_max);
    num("z_min", c.z_min);
    num("z_max", c.z_max);
    out << "n_y = " << c.n_y << '\n';
    out << "n_z = " << c.n_z << '\n';
    num("lp_dt", c.lp_dt);
    num("tol", c.tol);
    num("trunc_tol", c.trunc_tol);
    num("track_offset", c.track_offset);
    num("jump_cap", c.jump_cap);
    out << "tamed = " << c.tamed << '\n';
    return out.str();
}

}  // namespace koper
