#include "koper/slow_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace koper {

RandomOdeSetup RandomOdeSetup::make(const KoperParams& p, StablePath path) {
    p.validate();
    RandomOdeSetup s;
    s.params = p;
    s.path = std::move(path);
    s.eta_scale = std::pow(p.eps, -1.0 / p.alpha);
    return s;
}

State transform_to_random(const State& s, const RandomOdeSetup& setup, double t) {
    return {s.x - setup.params.sigma * setup.eta(t), s.y, s.z};
}

State transform_from_random(const State& S, const RandomOdeSetup& setup, double t) {
    return {S.x + setup.params.sigma * setup.eta(t), S.y, S.z};
}

Trajectory solve_random_ode(const RandomOdeSetup& setup, State s0, double t0,
                            double t1, double dt) {
    const KoperParams& p = setup.params;
    double lo = std::min(t0, t1), hi = std::max(t0, t1);
    if (setup.path.t_min() > lo + 1e-12 || setup.path.t_max() < hi - 1e-12)
        throw std::out_of_range("solve_random_ode: span outside path support");
    DriftFn f = [&](const State& s, double t) {
        State arg{s.x + p.sigma * setup.eta(t), s.y, s.z};
        auto g = setup.g(arg);
        return std::array<double, 3>{g[0] / p.eps, g[1], p.eps_hat * g[2]};
    };
    Trajectory traj = rk4_core(f, s0, t0, t1, dt);
    traj.params = p;
    traj.seed = setup.path.seed();
    return traj;
}

double contraction_rate(double K, double gamma, double eps) {
    if (!(K > 0.0) || !(gamma > 0.0))
        throw std::domain_error("contraction_rate: K and gamma must be positive");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::domain_error("contraction_rate: eps must be in [0,1)");
    return K * (1.0 - 2.0 * eps) / gamma;
}

double lp_truncation_horizon(double eps, double gamma, double trunc_tol) {
    if (!(trunc_tol > 0.0 && trunc_tol < 1.0))
        throw std::domain_error("lp_truncation_horizon: trunc_tol must be in (0,1)");
    return eps / gamma * std::log(1.0 / trunc_tol);
}

double weighted_norm(const std::vector<double>& times,
                     const std::vector<State>& states, double beta) {
    double nx = 0.0, ny = 0.0, nz = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double w = std::exp(-beta * times[i]);
        nx = std::max(nx, w * std::abs(states[i].x));
        ny = std::max(ny, w * std::abs(states[i].y));
        nz = std::max(nz, w * std::abs(states[i].z));
    }
    return nx + ny + nz;
}

KoperParams resolve_contraction_constants(KoperParams p,
                                          const std::optional<Box>& box) {
    if (p.K <= 0.0) {
        if (p.cutoff_enabled()) {
            p.K = lipschitz_cutoff(p).K_total;
        } else if (box.has_value()) {
            p.K = estimate_lipschitz(p, *box, 201).K_total;
        } else {
            throw std::domain_error(
                "resolve_contraction_constants: need a cutoff drift or a box");
        }
    }
    if (p.gamma <= 0.0) p.gamma = 2.0 * p.K * (1.0 - 2.0 * p.eps);
    return p;
}

namespace {

struct LpGrid {
    std::vector<double> times;  // -(n)dt ... 0
    double dt;
};

LpGrid make_lp_grid(double T_trunc, double dt) {
    auto n = static_cast<long>(std::ceil(T_trunc / dt - 1e-9));
    if (n < 1) n = 1;
    LpGrid g;
    g.dt = dt;
    g.times.reserve(static_cast<std::size_t>(n) + 1);
    for (long j = n; j >= 0; --j) g.times.push_back(-static_cast<double>(j) * dt);
    return g;
}

// One stabilized sweep of the discretized map. The fast component is the
// unstable loop of plain Picard (backward-in-time fast dynamics is
// expansive at rate |g1_x|/eps), so X is advanced with the trapezoid rule
// solved implicitly per step; Y, Z are then the plain backward trapezoid
// updates. A fixed point of this sweep satisfies exactly the same discrete
// relations as lp_apply, so the fixed points coincide.
std::vector<State> lp_sweep(const RandomOdeSetup& setup, double Y0, double Z0,
                            const std::vector<double>& times,
                            const std::vector<State>& U) {
    const KoperParams& p = setup.params;
    std::size_t n = times.size();
    std::vector<State> out(n);
    auto g1_at = [&](double X, std::size_t j) {
        State arg{X + p.sigma * setup.eta(times[j]), U[j].y, U[j].z};
        return setup.g(arg)[0];
    };
    out[0].x = 0.0;
    double g_prev = g1_at(0.0, 0);
    for (std::size_t j = 1; j < n; ++j) {
        double dt = times[j] - times[j - 1];
        double c = out[j - 1].x + 0.5 * dt * g_prev / p.eps;
        // Newton on F(X) = X - c - (dt/2 eps) g1(X,...), secant-slope fallback.
        double X = out[j - 1].x;
        double g_here = g1_at(X, j);
        for (int it = 0; it < 80; ++it) {
            double F = X - c - 0.5 * dt * g_here / p.eps;
            if (std::abs(F) <= 1e-13 * std::max(1.0, std::abs(X))) break;
            double h = 1e-7 * std::max(1.0, std::abs(X));
            double dg = (g1_at(X + h, j) - g1_at(X - h, j)) / (2.0 * h);
            double Fp = 1.0 - 0.5 * dt * dg / p.eps;
            if (std::abs(Fp) < 1e-12) Fp = 1.0;
            X -= F / Fp;
            g_here = g1_at(X, j);
        }
        out[j].x = X;
        g_prev = g_here;
    }
    std::vector<std::array<double, 3>> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        State arg{out[j].x + p.sigma * setup.eta(times[j]), U[j].y, U[j].z};
        g[j] = setup.g(arg);
    }
    out[n - 1].y = Y0;
    out[n - 1].z = Z0;
    for (std::size_t j = n - 1; j > 0; --j) {
        double dt = times[j] - times[j - 1];
        out[j - 1].y = out[j].y - 0.5 * dt * (g[j - 1][1] + g[j][1]);
        out[j - 1].z = out[j].z - 0.5 * dt * p.eps_hat * (g[j - 1][2] + g[j][2]);
    }
    return out;
}

}  // namespace

std::vector<State> lp_apply(const RandomOdeSetup& setup, double Y0, double Z0,
                            const std::vector<double>& times,
                            const std::vector<State>& U) {
    const KoperParams& p = setup.params;
    std::size_t n = times.size();
    std::vector<std::array<double, 3>> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        State arg{U[j].x + p.sigma * setup.eta(times[j]), U[j].y, U[j].z};
        g[j] = setup.g(arg);
    }
    std::vector<State> out(n);
    // X: cumulative trapezoid from the truncation horizon, scaled by 1/eps.
    out[0].x = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        double dt = times[j] - times[j - 1];
        out[j].x = out[j - 1].x + 0.5 * dt * (g[j - 1][0] + g[j][0]) / p.eps;
    }
    // Y, Z: anchored at t = 0, integrated backward.
    out[n - 1].y = Y0;
    out[n - 1].z = Z0;
    for (std::size_t j = n - 1; j > 0; --j) {
        double dt = times[j] - times[j - 1];
        out[j - 1].y = out[j].y - 0.5 * dt * (g[j - 1][1] + g[j][1]);
        out[j - 1].z = out[j].z - 0.5 * dt * p.eps_hat * (g[j - 1][2] + g[j][2]);
    }
    return out;
}

LpResult lp_iterate(const RandomOdeSetup& setup, double Y0, double Z0,
                    const LpOptions& opt) {
    const KoperParams& p = setup.params;
    if (!(p.K > 0.0 && p.gamma > 0.0))
        throw std::logic_error("lp_iterate: K and gamma must be resolved first");
    double rho = contraction_rate(p.K, p.gamma, p.eps);
    if (rho >= 1.0) throw ContractionError(p.K, p.gamma, rho);

    double T = lp_truncation_horizon(p.eps, p.gamma, opt.trunc_tol);
    LpGrid grid = make_lp_grid(T, opt.dt);
    if (setup.path.t_min() > grid.times.front() + 1e-12)
        throw std::out_of_range("lp_iterate: path does not cover [-T_trunc, 0]");
    double beta = -p.gamma / p.eps;

    LpResult res;
    res.times = grid.times;
    std::vector<State> U(grid.times.size(), State{0.0, Y0, Z0});
    double prev_dist = -1.0;
    for (int it = 0; it < opt.max_iter; ++it) {
        std::vector<State> next = lp_sweep(setup, Y0, Z0, grid.times, U);
        if (opt.hypothesis_box && !p.cutoff_enabled()) {
            const Box& b = *opt.hypothesis_box;
            for (std::size_t j = 0; j < grid.times.size(); ++j) {
                double xa = next[j].x + p.sigma * setup.eta(grid.times[j]);
                if (xa < b.x_lo || xa > b.x_hi || next[j].y < b.y_lo ||
                    next[j].y > b.y_hi || next[j].z < b.z_lo || next[j].z > b.z_hi)
                    throw BoxEscapeError(grid.times[j]);
            }
        }
        std::vector<State> diff(grid.times.size());
        for (std::size_t j = 0; j < grid.times.size(); ++j) diff[j] = next[j] - U[j];
        double dist = weighted_norm(grid.times, diff, beta);
        if (prev_dist > 0.0) res.ratios.push_back(dist / prev_dist);
        prev_dist = dist;
        U = std::move(next);
        res.iterations = it + 1;
        if (dist <= opt.tol) {
            res.fixed_point = std::move(U);
            res.h = res.fixed_point.back().x;
            return res;
        }
    }
    throw std::runtime_error("lp_iterate: no convergence within max_iter");
}

ManifoldGraph manifold_graph(const RandomOdeSetup& setup, double y_lo, double y_hi,
                             double z_lo, double z_hi, int n_y, int n_z,
                             const LpOptions& opt) {
    if (n_y < 1 || n_z < 1)
        throw std::invalid_argument("manifold_graph: need at least one node per axis");
    const KoperParams& p = setup.params;
    if (!(p.K > 0.0 && p.gamma > 0.0))
        throw std::logic_error("manifold_graph: K and gamma must be resolved first");

    ManifoldGraph g;
    g.K_used = p.K;
    g.gamma_used = p.gamma;
    g.rho = contraction_rate(p.K, p.gamma, p.eps);
    if (g.rho >= 1.0) throw ContractionError(p.K, p.gamma, g.rho);
    g.lip_bound = p.K / (p.gamma - p.K * (1.0 - 2.0 * p.eps));
    g.T_trunc = lp_truncation_horizon(p.eps, p.gamma, opt.trunc_tol);
    g.seed = setup.path.seed();
    for (int i = 0; i < n_y; ++i)
        g.y_grid.push_back(n_y == 1 ? y_lo : y_lo + (y_hi - y_lo) * i / (n_y - 1));
    for (int j = 0; j < n_z; ++j)
        g.z_grid.push_back(n_z == 1 ? z_lo : z_lo + (z_hi - z_lo) * j / (n_z - 1));
    g.h_values.assign(static_cast<std::size_t>(n_y),
                      std::vector<double>(static_cast<std::size_t>(n_z), 0.0));

    // Nodes are independent given the shared immutable path; compute rows
    // concurrently and merge by index.
    auto run_row = [&](std::size_t iy) {
        std::vector<std::pair<std::size_t, std::size_t>> failed;
        for (std::size_t iz = 0; iz < g.z_grid.size(); ++iz) {
            try {
                g.h_values[iy][iz] =
                    lp_iterate(setup, g.y_grid[iy], g.z_grid[iz], opt).h;
            } catch (const std::exception&) {
                g.h_values[iy][iz] = std::nan("");
                failed.emplace_back(iy, iz);
            }
        }
        return failed;
    };
    std::vector<std::future<std::vector<std::pair<std::size_t, std::size_t>>>> futs;
    for (std::size_t iy = 0; iy < g.y_grid.size(); ++iy)
        futs.push_back(std::async(std::launch::async, run_row, iy));
    for (auto& f : futs)
        for (auto& node : f.get()) g.failed_nodes.push_back(node);

    for (std::size_t i = 0; i < g.y_grid.size(); ++i)
        for (std::size_t j = 0; j < g.z_grid.size(); ++j) {
            if (std::isnan(g.h_values[i][j])) continue;
            if (i + 1 < g.y_grid.size() && !std::isnan(g.h_values[i + 1][j])) {
                double dy = std::abs(g.y_grid[i + 1] - g.y_grid[i]);
                g.lip_measured = std::max(
                    g.lip_measured, std::abs(g.h_values[i + 1][j] - g.h_values[i][j]) / dy);
            }
            if (j + 1 < g.z_grid.size() && !std::isnan(g.h_values[i][j + 1])) {
                double dz = std::abs(g.z_grid[j + 1] - g.z_grid[j]);
                g.lip_measured = std::max(
                    g.lip_measured, std::abs(g.h_values[i][j + 1] - g.h_values[i][j]) / dz);
            }
        }
    return g;
}

double check_invariance(const RandomOdeSetup& setup, double Y0, double Z0,
                        double s, const LpOptions& opt) {
    if (!(s >= 0.0)) throw std::invalid_argument("check_invariance: s must be >= 0");
    LpResult base = lp_iterate(setup, Y0, Z0, opt);
    if (s == 0.0) return 0.0;

    State start{base.h, Y0, Z0};
    Trajectory fwd = solve_random_ode(setup, start, 0.0, s, opt.dt);
    State evolved = fwd.back();
    // Fast coordinate expressed in the shifted frame (eta re-anchors to 0).
    double x_shifted = evolved.x + setup.params.sigma * setup.eta(s);

    RandomOdeSetup shifted =
        RandomOdeSetup::make(setup.params, shift(setup.path, s));
    shifted.drift_override = setup.drift_override;
    LpResult moved = lp_iterate(shifted, evolved.y, evolved.z, opt);
    return std::abs(x_shifted - moved.h);
}

TrackingResult exponential_tracking(const RandomOdeSetup& setup, State u_on,
                                    State u_off, double t_end, double dt) {
    if (!(t_end > 0.0)) throw std::invalid_argument("exponential_tracking: t_end must be > 0");
    Trajectory a = solve_random_ode(setup, u_on, 0.0, t_end, dt);
    Trajectory b = solve_random_ode(setup, u_off, 0.0, t_end, dt);

    TrackingResult res;
    res.times = a.times;
    res.log_distances.reserve(a.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        double d = norm(a.states[i] - b.states[i]);
        res.log_distances.push_back(d > 0.0 ? std::log(d) : -1e300);
    }

    // Fit over the second half, truncated where the distance underflows.
    std::size_t lo = a.times.size() / 2;
    std::size_t hi = a.times.size();
    for (std::size_t i = lo; i < hi; ++i) {
        double d = norm(a.states[i] - b.states[i]);
        if (d < 1e-14) {
            hi = i;
            break;
        }
    }
    if (hi < lo + 2) {
        res.c2_fit = std::nan("");
        res.fit_valid = false;
        return res;
    }
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    double n = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        st += res.times[i];
        sl += res.log_distances[i];
        stt += res.times[i] * res.times[i];
        stl += res.times[i] * res.log_distances[i];
    }
    double denom = n * stt - st * st;
    if (std::abs(denom) < 1e-30) {
        res.c2_fit = std::nan("");
        res.fit_valid = false;
        return res;
    }
    res.c2_fit = (n * stl - st * sl) / denom;
    res.fit_valid = true;
    return res;
}

}  // namespace koper
