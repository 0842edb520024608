// Random transformation, the associated random ODE, and the
// Lyapunov-Perron construction of the random slow manifold.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "koper/integrators.hpp"
#include "koper/model.hpp"
#include "koper/stable_noise.hpp"

namespace koper {

// Immutable pairing of parameters with a two-sided noise path.
// eta(t) = eps^(-1/alpha) * omega(t), looked up cadlag on the path grid.
struct RandomOdeSetup {
    KoperParams params;
    StablePath path;
    double eta_scale = 0.0;  // eps^(-1/alpha), cached

    // Test hook: replaces the Koper nonlinearities (g1,g2,g3).
    std::function<std::array<double, 3>(const State&)> drift_override;

    static RandomOdeSetup make(const KoperParams& p, StablePath path);

    double eta(double t) const { return eta_scale * path.value(t); }
    std::array<double, 3> g(const State& arg) const {
        return drift_override ? drift_override(arg) : drift(arg, params);
    }
};

// X = x - sigma*eta(t), slow variables unchanged; round-trip is exact.
State transform_to_random(const State& s, const RandomOdeSetup& setup, double t);
State transform_from_random(const State& S, const RandomOdeSetup& setup, double t);

// RK4 on the non-autonomous random ODE
//   dX = (1/eps) g1(X + sigma*eta(t), Y, Z) dt,
//   dY = g2(...) dt,  dZ = eps_hat g3(...) dt,
// forward or backward over [t0, t1].
Trajectory solve_random_ode(const RandomOdeSetup& setup, State s0, double t0,
                            double t1, double dt);

// rho = K (1 - 2 eps) / gamma, the three-term operator bound evaluated at
// beta = -gamma/eps.
double contraction_rate(double K, double gamma, double eps);

class ContractionError : public std::runtime_error {
public:
    ContractionError(double K, double gamma, double rho)
        : std::runtime_error("contraction violated: K=" + std::to_string(K) +
                             " gamma=" + std::to_string(gamma) +
                             " rho=" + std::to_string(rho)) {}
};

class BoxEscapeError : public std::runtime_error {
public:
    explicit BoxEscapeError(double t)
        : std::runtime_error("iterate left the hypothesis box at t=" +
                             std::to_string(t)),
          time(t) {}
    double time;
};

struct LpOptions {
    double dt = 1e-4;
    double tol = 1e-8;
    double trunc_tol = 1e-8;   // sets T_trunc = (eps/gamma) ln(1/trunc_tol)
    int max_iter = 200;
    // When set (and the cutoff drift is off), every iterate argument
    // (X + sigma*eta, Y, Z) must stay inside this box.
    std::optional<Box> hypothesis_box;
};

struct LpResult {
    std::vector<double> times;   // uniform grid on [-T_trunc, 0]
    std::vector<State> fixed_point;
    double h = 0.0;              // X-component at t = 0
    std::vector<double> ratios;  // successive weighted-norm distance ratios
    int iterations = 0;
};

// Truncation horizon with weight decay e^(-gamma T/eps) <= trunc_tol.
double lp_truncation_horizon(double eps, double gamma, double trunc_tol);

// Sum over components of sup_t e^(-beta t) |component(t)|.
double weighted_norm(const std::vector<double>& times,
                     const std::vector<State>& states, double beta);

// Fill params.K / params.gamma when unset: K from the closed-form cutoff
// constant (cutoff on) or a box estimate, gamma = 2 K (1 - 2 eps).
KoperParams resolve_contraction_constants(KoperParams p,
                                          const std::optional<Box>& box = {});

// Picard iteration of the Lyapunov-Perron map on the truncated grid,
// trapezoidal quadrature, starting from U0 = (0, Y0, Z0).
LpResult lp_iterate(const RandomOdeSetup& setup, double Y0, double Z0,
                    const LpOptions& opt);

// Re-apply the Lyapunov-Perron map once; used for residual checks.
std::vector<State> lp_apply(const RandomOdeSetup& setup, double Y0, double Z0,
                            const std::vector<double>& times,
                            const std::vector<State>& U);

struct ManifoldGraph {
    std::vector<double> y_grid;
    std::vector<double> z_grid;
    std::vector<std::vector<double>> h_values;  // [iy][iz]
    double lip_measured = 0.0;
    double lip_bound = 0.0;   // K / (gamma - K (1 - 2 eps))
    double K_used = 0.0;
    double gamma_used = 0.0;
    double rho = 0.0;
    double T_trunc = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::size_t, std::size_t>> failed_nodes;
};

ManifoldGraph manifold_graph(const RandomOdeSetup& setup, double y_lo, double y_hi,
                             double z_lo, double z_hi, int n_y, int n_z,
                             const LpOptions& opt);

// Starts on the graph at (Y0, Z0), evolves the random ODE to time s,
// recomputes the graph value under the shifted path at the evolved slow
// coordinates, and returns the fast-coordinate mismatch. The comparison is
// made in the shifted frame, where the evolved fast coordinate is
// X(s) + sigma*eta(s).
double check_invariance(const RandomOdeSetup& setup, double Y0, double Z0,
                        double s, const LpOptions& opt);

struct TrackingResult {
    double c2_fit = 0.0;
    bool fit_valid = false;
    std::vector<double> times;
    std::vector<double> log_distances;
};

// Evolves both states under the random ODE with the same path and fits a
// line to log|difference| over the second half of [0, t_end]. Distances
// below 1e-14 truncate the fit window.
TrackingResult exponential_tracking(const RandomOdeSetup& setup, State u_on,
                                    State u_off, double t_end, double dt);

}  // namespace koper
