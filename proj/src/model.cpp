#include "koper/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace koper {

double norm(const State& s) { return std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z); }
double norm_inf(const State& s) {
    return std::max({std::abs(s.x), std::abs(s.y), std::abs(s.z)});
}

void KoperParams::validate() const {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("KoperParams: eps must be in (0,1)");
    if (!(sigma >= 0.0)) throw std::domain_error("KoperParams: sigma must be >= 0");
    if (sigma > 0.0 && !(alpha > 0.0 && alpha <= 2.0))
        throw std::domain_error("KoperParams: alpha must be in (0,2]");
    if (!(eps_hat > 0.0)) throw std::domain_error("KoperParams: eps_hat must be > 0");
}

double cubic_part(double x, const KoperParams& p) {
    double r = p.cutoff_radius;
    if (r > 0.0 && std::abs(x) > r) {
        double s = x > 0.0 ? 1.0 : -1.0;
        // C^1 linear continuation outside [-r, r].
        return s * (-r * r * r + 3.0 * r) + (3.0 - 3.0 * r * r) * (x - s * r);
    }
    return -x * x * x + 3.0 * x;
}

double cubic_part_dx(double x, const KoperParams& p) {
    double r = p.cutoff_radius;
    if (r > 0.0 && std::abs(x) > r) return 3.0 - 3.0 * r * r;
    return 3.0 - 3.0 * x * x;
}

std::array<double, 3> drift(const State& s, const KoperParams& p) {
    double g1 = p.k * s.y + cubic_part(s.x, p) - p.lambda(s.z);
    double g2 = s.x - 2.0 * s.y + s.z;
    double g3 = s.y - s.z;
    return {g1, g2, g3};
}

double Mat3::det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

std::array<double, 3> solve3(const Mat3& A, const std::array<double, 3>& b) {
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = A.m[i][j];
        a[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14)
            throw std::runtime_error("solve3: singular matrix");
        if (piv != col)
            for (int j = 0; j < 4; ++j) std::swap(a[piv][j], a[col][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return {a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]};
}

Mat3 jacobian(const State& s, const KoperParams& p) {
    Mat3 J;
    J.m[0][0] = cubic_part_dx(s.x, p);
    J.m[0][1] = p.k;
    J.m[0][2] = -p.lambda1;
    J.m[1][0] = p.eps;
    J.m[1][1] = -2.0 * p.eps;
    J.m[1][2] = p.eps;
    J.m[2][0] = 0.0;
    J.m[2][1] = p.eps * p.eps_hat;
    J.m[2][2] = -p.eps * p.eps_hat;
    return J;
}

std::array<double, 3> rescaled_drift(const State& s, const KoperParams& p) {
    auto g = drift(s, p);
    return {g[0], p.eps * g[1], p.eps * p.eps_hat * g[2]};
}

State find_equilibrium(const KoperParams& p, State guess, double tol, int max_iter) {
    if (!(tol > 0.0)) throw std::domain_error("find_equilibrium: tol must be > 0");
    State s = guess;
    for (int iter = 0; iter < max_iter; ++iter) {
        auto f = rescaled_drift(s, p);
        double res = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
        if (res <= tol) return s;
        auto step = solve3(jacobian(s, p), f);
        // Damped update: halve the step while the residual fails to decrease.
        double lam = 1.0;
        for (int halving = 0; halving < 30; ++halving) {
            State trial{s.x - lam * step[0], s.y - lam * step[1], s.z - lam * step[2]};
            auto ft = rescaled_drift(trial, p);
            double rt = std::sqrt(ft[0] * ft[0] + ft[1] * ft[1] + ft[2] * ft[2]);
            if (rt < res) {
                s = trial;
                break;
            }
            lam *= 0.5;
            if (halving == 29) s = trial;
        }
    }
    auto f = rescaled_drift(s, p);
    double res = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
    if (res > tol) throw std::runtime_error("find_equilibrium: no convergence");
    return s;
}

std::array<std::complex<double>, 3> solve_cubic(double a2, double a1, double a0) {
    // Depressed form t^3 + p t + q with x = t - a2/3.
    double shift = a2 / 3.0;
    double pp = a1 - a2 * a2 / 3.0;
    double qq = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    double disc = qq * qq / 4.0 + pp * pp * pp / 27.0;
    std::array<std::complex<double>, 3> roots;
    if (disc > 0.0) {
        // One real root and a conjugate pair.
        double sq = std::sqrt(disc);
        double u = std::cbrt(-qq / 2.0 + sq);
        double v = std::cbrt(-qq / 2.0 - sq);
        double t0 = u + v;
        roots[0] = {t0 - shift, 0.0};
        double re = -t0 / 2.0 - shift;
        double im = std::sqrt(3.0) / 2.0 * (u - v);
        roots[1] = {re, im};
        roots[2] = {re, -im};
    } else {
        // Three real roots, trigonometric method.
        double r = std::sqrt(std::max(-pp, 0.0) / 3.0);
        double arg = (r > 0.0) ? std::clamp(3.0 * qq / (2.0 * pp * r), -1.0, 1.0) : 0.0;
        double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) {
            double t = 2.0 * r * std::cos(phi / 3.0 - 2.0 * 3.14159265358979323846 * k / 3.0);
            roots[static_cast<std::size_t>(k)] = {t - shift, 0.0};
        }
    }
    return roots;
}

EquilibriumClass classify_equilibrium(const Mat3& J) {
    EquilibriumClass out;
    out.trace = J.trace();
    out.det = J.det();
    // Sum of principal 2x2 minors.
    double m12 = J.m[0][0] * J.m[1][1] - J.m[0][1] * J.m[1][0];
    double m13 = J.m[0][0] * J.m[2][2] - J.m[0][2] * J.m[2][0];
    double m23 = J.m[1][1] * J.m[2][2] - J.m[1][2] * J.m[2][1];
    // Characteristic polynomial: l^3 - tr l^2 + (sum minors) l - det.
    out.eigenvalues = solve_cubic(-out.trace, m12 + m13 + m23, -out.det);
    out.stable = true;
    for (const auto& ev : out.eigenvalues)
        if (!(ev.real() < 0.0)) out.stable = false;
    return out;
}

namespace {

void check_box(const Box& box, int n_grid) {
    if (!(box.x_lo <= box.x_hi && box.y_lo <= box.y_hi && box.z_lo <= box.z_hi))
        throw std::invalid_argument("estimate_lipschitz: empty box");
    if (n_grid < 2) throw std::invalid_argument("estimate_lipschitz: n_grid must be >= 2");
}

}  // namespace

LipschitzEstimate estimate_lipschitz(const KoperParams& p, const Box& box, int n_grid) {
    check_box(box, n_grid);
    LipschitzEstimate e;
    // Only the x-derivative of g1 varies over the box.
    for (int i = 0; i < n_grid; ++i) {
        double x = box.x_lo + (box.x_hi - box.x_lo) * i / (n_grid - 1);
        e.dg1_dx = std::max(e.dg1_dx, std::abs(cubic_part_dx(x, p)));
    }
    e.dg1_dy = std::abs(p.k);
    e.dg1_dz = std::abs(p.lambda1);
    e.col_x = e.dg1_dx + 1.0;               // g2 contributes |d g2/dx| = 1
    e.col_y = e.dg1_dy + 2.0 + 1.0;         // g2: 2, g3: 1
    e.col_z = e.dg1_dz + 1.0 + 1.0;
    e.K_total = std::max({e.col_x, e.col_y, e.col_z});
    return e;
}

LipschitzEstimate lipschitz_cutoff(const KoperParams& p) {
    if (!p.cutoff_enabled())
        throw std::domain_error("lipschitz_cutoff: cutoff_radius must be > 0");
    double r = p.cutoff_radius;
    LipschitzEstimate e;
    // |3 - 3x^2| on [-r, r] peaks at x = 0 or x = +-r; constant outside.
    e.dg1_dx = std::max(3.0, std::abs(3.0 - 3.0 * r * r));
    e.dg1_dy = std::abs(p.k);
    e.dg1_dz = std::abs(p.lambda1);
    e.col_x = e.dg1_dx + 1.0;
    e.col_y = e.dg1_dy + 3.0;
    e.col_z = e.dg1_dz + 2.0;
    e.K_total = std::max({e.col_x, e.col_y, e.col_z});
    return e;
}

HypothesisAudit audit_hypotheses(const KoperParams& p, const Box& box, int n_grid) {
    check_box(box, n_grid);
    HypothesisAudit a;
    a.h3_worst = -1e300;
    for (int i = 0; i < n_grid; ++i) {
        double x = box.x_lo + (box.x_hi - box.x_lo) * i / (n_grid - 1);
        a.h3_worst = std::max(a.h3_worst, cubic_part_dx(x, p));
        for (int j = 0; j < n_grid; ++j) {
            double y = box.y_lo + (box.y_hi - box.y_lo) * j / (n_grid - 1);
            for (int l = 0; l < n_grid; ++l) {
                double z = box.z_lo + (box.z_hi - box.z_lo) * l / (n_grid - 1);
                auto g = drift({x, y, z}, p);
                double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                double s2 = 1.0 + x * x + y * y + z * z;
                a.h2_growth_L = std::max(a.h2_growth_L, g2 / s2);
            }
        }
    }
    a.h3_holds = a.h3_worst < 0.0;
    return a;
}

}  // namespace koper
