#include "koper/integrators.hpp"

#include <cmath>

namespace koper {

namespace {

void guard(const State& s, double t, std::size_t step) {
    if (!(norm_inf(s) < kBlowUpGuard) || !std::isfinite(norm_inf(s)))
        throw BlowUpError(t, step);
}

long step_count(double t0, double t_end, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrator: dt must be positive");
    double span = std::abs(t_end - t0);
    long n = static_cast<long>(std::llround(span / dt));
    if (n < 0 || std::abs(n * dt - span) > 1e-9 * std::max(1.0, span))
        throw std::invalid_argument("integrator: dt must divide the time span");
    return n;
}

}  // namespace

Trajectory em_core(const DriftFn& f, State s0, const StablePath* path,
                   double noise_coef, double t0, double t_end, double dt,
                   bool tamed) {
    long n = step_count(t0, t_end, dt);
    if (t_end < t0) throw std::invalid_argument("em_core: backward spans unsupported");
    if (path != nullptr &&
        (path->t_min() > t0 + 1e-12 || path->t_max() < t_end - 1e-12))
        throw std::invalid_argument("em_core: path does not cover the time span");

    Trajectory traj;
    traj.dt = dt;
    traj.times.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    State s = s0;
    traj.times.push_back(t0);
    traj.states.push_back(s);
    for (long i = 0; i < n; ++i) {
        double t = t0 + static_cast<double>(i) * dt;
        auto g = f(s, t);
        if (tamed) {
            double mag = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
            double damp = 1.0 + dt * mag;
            g = {g[0] / damp, g[1] / damp, g[2] / damp};
        }
        s.x += dt * g[0];
        s.y += dt * g[1];
        s.z += dt * g[2];
        if (path != nullptr)
            s.x += noise_coef * (path->value(t + dt) - path->value(t));
        guard(s, t + dt, static_cast<std::size_t>(i) + 1);
        traj.times.push_back(t0 + static_cast<double>(i + 1) * dt);
        traj.states.push_back(s);
    }
    return traj;
}

Trajectory rk4_core(const DriftFn& f, State s0, double t0, double t_end, double dt) {
    long n = step_count(t0, t_end, dt);
    double h = (t_end >= t0) ? dt : -dt;

    Trajectory traj;
    traj.scheme = Scheme::rk4_deterministic;
    traj.dt = dt;
    traj.times.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    State s = s0;
    traj.times.push_back(t0);
    traj.states.push_back(s);
    auto eval = [&](const State& u, double t) { return f(u, t); };
    for (long i = 0; i < n; ++i) {
        double t = t0 + static_cast<double>(i) * h;
        auto k1 = eval(s, t);
        State s2{s.x + 0.5 * h * k1[0], s.y + 0.5 * h * k1[1], s.z + 0.5 * h * k1[2]};
        auto k2 = eval(s2, t + 0.5 * h);
        State s3{s.x + 0.5 * h * k2[0], s.y + 0.5 * h * k2[1], s.z + 0.5 * h * k2[2]};
        auto k3 = eval(s3, t + 0.5 * h);
        State s4{s.x + h * k3[0], s.y + h * k3[1], s.z + h * k3[2]};
        auto k4 = eval(s4, t + h);
        s.x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        s.y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        s.z += h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
        guard(s, t + h, static_cast<std::size_t>(i) + 1);
        traj.times.push_back(t0 + static_cast<double>(i + 1) * h);
        traj.states.push_back(s);
    }
    return traj;
}

Trajectory integrate_em(const KoperParams& p, State s0, const StablePath& path,
                        double t_end, double dt, bool tamed) {
    p.validate();
    DriftFn f = [&p](const State& s, double) {
        auto g = drift(s, p);
        return std::array<double, 3>{g[0] / p.eps, g[1], p.eps_hat * g[2]};
    };
    double coef = p.sigma * std::pow(p.eps, -1.0 / p.alpha);
    const StablePath* pp = p.sigma > 0.0 ? &path : nullptr;
    Trajectory traj = em_core(f, s0, pp, coef, 0.0, t_end, dt, tamed);
    traj.params = p;
    traj.scheme = Scheme::euler_maruyama;
    traj.seed = path.seed();
    return traj;
}

Trajectory integrate_rescaled(const KoperParams& p, State s0, const StablePath& path,
                              double t_end, double dt, bool tamed) {
    p.validate();
    DriftFn f = [&p](const State& s, double) {
        auto g = drift(s, p);
        return std::array<double, 3>{g[0], p.eps * g[1], p.eps * p.eps_hat * g[2]};
    };
    const StablePath* pp = p.sigma > 0.0 ? &path : nullptr;
    Trajectory traj = em_core(f, s0, pp, p.sigma, 0.0, t_end, dt, tamed);
    traj.params = p;
    traj.scheme = Scheme::euler_maruyama;
    traj.seed = path.seed();
    return traj;
}

Trajectory integrate_rk4_deterministic(const KoperParams& p, State s0,
                                       double t_end, double dt) {
    p.validate();
    if (p.sigma != 0.0)
        throw std::invalid_argument("integrate_rk4_deterministic: sigma must be 0");
    DriftFn f = [&p](const State& s, double) { return rescaled_drift(s, p); };
    Trajectory traj = rk4_core(f, s0, 0.0, t_end, dt);
    traj.params = p;
    return traj;
}

}  // namespace koper
