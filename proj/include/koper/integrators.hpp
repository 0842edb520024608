// Trajectory integrators: Euler-Maruyama for the stochastic system and
// classical RK4 for the deterministic limit.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "koper/model.hpp"
#include "koper/stable_noise.hpp"

namespace koper {

enum class Scheme { euler_maruyama, rk4_deterministic };

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    KoperParams params;
    Scheme scheme = Scheme::euler_maruyama;
    std::optional<std::uint64_t> seed;
    double dt = 0.0;

    const State& back() const { return states.back(); }
};

// Raised when a state norm passes the overflow guard; carries the first
// bad step.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, std::size_t step_index)
        : std::runtime_error("trajectory blow-up at t=" + std::to_string(t)),
          time(t), step(step_index) {}
    double time;
    std::size_t step;
};

inline constexpr double kBlowUpGuard = 1e9;

// Non-autonomous vector field for the generic cores.
using DriftFn = std::function<std::array<double, 3>(const State&, double)>;

// Explicit Euler(-Maruyama) core. The noise increment
// noise_coef * (omega(t+dt) - omega(t)) enters the first component only;
// pass path = nullptr for the deterministic explicit-Euler scheme.
// tamed divides the drift by (1 + dt*|drift|).
Trajectory em_core(const DriftFn& f, State s0, const StablePath* path,
                   double noise_coef, double t0, double t_end, double dt,
                   bool tamed = false);

// Classical RK4 core; integrates backward when t_end < t0.
Trajectory rk4_core(const DriftFn& f, State s0, double t0, double t_end, double dt);

// Euler-Maruyama on the original system (1):
//   x += (dt/eps) g1 + sigma eps^(-1/alpha) dL;  y += dt g2;  z += dt eps_hat g3.
Trajectory integrate_em(const KoperParams& p, State s0, const StablePath& path,
                        double t_end, double dt, bool tamed = false);

// Euler-Maruyama on the time-rescaled system:
//   dx = g1 dt + sigma dL;  dy = eps g2 dt;  dz = eps eps_hat g3 dt.
Trajectory integrate_rescaled(const KoperParams& p, State s0, const StablePath& path,
                              double t_end, double dt, bool tamed = false);

// RK4 on the rescaled deterministic system; requires sigma == 0.
Trajectory integrate_rk4_deterministic(const KoperParams& p, State s0,
                                       double t_end, double dt);

}  // namespace koper
