// Koper vector field, parameters, equilibria, and linearization.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace koper {

struct State {
    double x = 0.0;  // fast variable
    double y = 0.0;  // slow
    double z = 0.0;  // slow

    State() = default;
    State(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
};

inline State operator+(const State& a, const State& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline State operator-(const State& a, const State& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline State operator*(double c, const State& s) { return {c * s.x, c * s.y, c * s.z}; }
double norm(const State& s);
double norm_inf(const State& s);

// Model constants together with the hypothesis constants used by the
// slow-manifold estimates. lambda(z) = lambda0 + lambda1 * z.
struct KoperParams {
    double k = -10.0;
    double lambda0 = -3.0;
    double lambda1 = -5.0;
    double eps = 0.05;      // scale ratio, in (0,1)
    double eps_hat = 1.0;   // slow-slower ratio
    double sigma = 0.5;     // noise intensity, >= 0
    double alpha = 1.6;     // stability index
    double K = 0.0;         // Lipschitz constant; <= 0 means "derive"
    double gamma = 0.0;     // decay-rate parameter; <= 0 means "derive"

    // > 0 replaces the cubic in g1 by a C^1 linear continuation outside
    // |x| <= cutoff_radius, making g1 globally Lipschitz.
    double cutoff_radius = 0.0;

    double lambda(double z) const { return lambda0 + lambda1 * z; }
    bool cutoff_enabled() const { return cutoff_radius > 0.0; }

    // Throws std::domain_error on invariant violations.
    void validate() const;
};

// The cubic part -x^3 + 3x of g1, with the optional linear continuation.
double cubic_part(double x, const KoperParams& p);
double cubic_part_dx(double x, const KoperParams& p);

// Unscaled nonlinearities (g1, g2, g3); the 1/eps and eps_hat factors are
// applied by integrators, not here.
std::array<double, 3> drift(const State& s, const KoperParams& p);

struct Mat3 {
    double m[3][3] = {};
    double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
    double det() const;
};

// Solve A u = b by Gaussian elimination with partial pivoting.
// Throws std::runtime_error on a (numerically) singular matrix.
std::array<double, 3> solve3(const Mat3& A, const std::array<double, 3>& b);

// Jacobian of the time-rescaled deterministic system
// (xdot = g1, ydot = eps g2, zdot = eps eps_hat g3).
Mat3 jacobian(const State& s, const KoperParams& p);

// Right-hand side of the rescaled deterministic system.
std::array<double, 3> rescaled_drift(const State& s, const KoperParams& p);

// Damped Newton iteration on the rescaled drift.
State find_equilibrium(const KoperParams& p, State guess, double tol = 1e-12,
                       int max_iter = 100);

struct EquilibriumClass {
    std::array<std::complex<double>, 3> eigenvalues;
    bool stable = false;
    double trace = 0.0;
    double det = 0.0;
};

// Eigenvalues via closed-form roots of the characteristic cubic; stable
// iff all real parts are negative.
EquilibriumClass classify_equilibrium(const Mat3& J);

// Roots of x^3 + a2 x^2 + a1 x + a0.
std::array<std::complex<double>, 3> solve_cubic(double a2, double a1, double a0);

struct Box {
    double x_lo, x_hi;
    double y_lo, y_hi;
    double z_lo, z_hi;
};

struct LipschitzEstimate {
    // Per-argument partial-derivative bounds of g1 over the box.
    double dg1_dx = 0.0;
    double dg1_dy = 0.0;
    double dg1_dz = 0.0;
    // Column sums sum_m |dg_m/dvar|, whose max is the H1 constant for the
    // sum-of-differences form.
    double col_x = 0.0;
    double col_y = 0.0;
    double col_z = 0.0;
    double K_total = 0.0;
};

// H1 constant over a grid on the box; monotone nondecreasing in box size.
LipschitzEstimate estimate_lipschitz(const KoperParams& p, const Box& box,
                                     int n_grid);

// Closed-form global H1 constant for the cutoff-modified drift.
// Requires cutoff_radius > 0.
LipschitzEstimate lipschitz_cutoff(const KoperParams& p);

struct HypothesisAudit {
    double h2_growth_L = 0.0;   // smallest L with |g|^2 <= L(1+|s|^2) on the grid
    bool h3_holds = false;      // monotone decrease of g1 in x over the box
    double h3_worst = 0.0;      // max of d(cubic)/dx over the box
};

// Direct grid evaluation of the growth and monotonicity hypotheses.
HypothesisAudit audit_hypotheses(const KoperParams& p, const Box& box, int n_grid);

}  // namespace koper
