#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>

#include "koper/model.hpp"
#include "koper/rng.hpp"

using namespace koper;

namespace {

// Sort a set of complex eigenvalues canonically for comparison.
std::array<std::complex<double>, 3> sorted(std::array<std::complex<double>, 3> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST_CASE("drift at the example parameters") {
    KoperParams p;  // k=-10, lambda(z)=-5z-3
    auto gP = drift({1.0, 1.0, 1.0}, p);
    CHECK(std::abs(gP[0]) <= 1e-14);
    CHECK(std::abs(gP[1]) <= 1e-14);
    CHECK(std::abs(gP[2]) <= 1e-14);

    auto g0 = drift({0.0, 0.0, 0.0}, p);
    CHECK(g0[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(g0[1] == 0.0);
    CHECK(g0[2] == 0.0);

    // g3 vanishes on the y = z diagonal for any parameters.
    KoperParams q;
    q.k = 2.0;
    q.lambda0 = 0.7;
    q.lambda1 = -1.3;
    CHECK(drift({0.4, -2.0, -2.0}, q)[2] == 0.0);
}

TEST_CASE("jacobian at P matches the closed form") {
    KoperParams p;
    Mat3 J = jacobian({1.0, 1.0, 1.0}, p);
    double expected[3][3] = {{0.0, -10.0, 5.0},
                             {0.05, -0.1, 0.05},
                             {0.0, 0.05, -0.05}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(J.m[i][j] == doctest::Approx(expected[i][j]).epsilon(1e-14));
    CHECK(jacobian({0.0, 0.0, 0.0}, p).m[0][0] == 3.0);
}

TEST_CASE("jacobian matches central finite differences") {
    KoperParams p;
    Rng rng(31);
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        State s{6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0,
                6.0 * rng.uniform01() - 3.0};
        Mat3 J = jacobian(s, p);
        for (int col = 0; col < 3; ++col) {
            State sp = s, sm = s;
            double* cp[3] = {&sp.x, &sp.y, &sp.z};
            double* cm[3] = {&sm.x, &sm.y, &sm.z};
            *cp[col] += h;
            *cm[col] -= h;
            auto gp = rescaled_drift(sp, p);
            auto gm = rescaled_drift(sm, p);
            for (int row = 0; row < 3; ++row) {
                double fd = (gp[row] - gm[row]) / (2.0 * h);
                double scale = std::max(1.0, std::abs(J.m[row][col]));
                CHECK(std::abs(fd - J.m[row][col]) <= 1e-6 * scale);
            }
        }
    }
}

TEST_CASE("find_equilibrium locates P") {
    KoperParams p;
    State e = find_equilibrium(p, {0.9, 0.9, 0.9}, 1e-12);
    CHECK(std::abs(e.x - 1.0) <= 1e-10);
    CHECK(std::abs(e.y - 1.0) <= 1e-10);
    CHECK(std::abs(e.z - 1.0) <= 1e-10);

    // Starting at P returns P unchanged.
    State at = find_equilibrium(p, {1.0, 1.0, 1.0}, 1e-12);
    CHECK(at.x == 1.0);
    CHECK(at.y == 1.0);
    CHECK(at.z == 1.0);

    // Basin check from a far guess.
    State far = find_equilibrium(p, {5.0, 5.0, 5.0}, 1e-12);
    CHECK(std::abs(far.x - 1.0) <= 1e-8);
    CHECK(std::abs(far.y - 1.0) <= 1e-8);
    CHECK(std::abs(far.z - 1.0) <= 1e-8);

    CHECK_THROWS_AS(find_equilibrium(p, {1, 1, 1}, -1.0), std::domain_error);
}

TEST_CASE("classify_equilibrium trace and det formulas") {
    for (double eps : {0.01, 0.05, 0.1}) {
        KoperParams p;
        p.eps = eps;
        auto cls = classify_equilibrium(jacobian({1.0, 1.0, 1.0}, p));
        CHECK(std::abs(cls.trace - (-3.0 * eps)) <= 1e-12);
        CHECK(std::abs(cls.det - (-5.0 * eps * eps)) <= 1e-12);
        // Product of eigenvalues equals the determinant.
        std::complex<double> prod =
            cls.eigenvalues[0] * cls.eigenvalues[1] * cls.eigenvalues[2];
        CHECK(std::abs(prod.real() - cls.det) <= 1e-8);
        CHECK(std::abs(prod.imag()) <= 1e-8);
    }
}

TEST_CASE("classify_equilibrium eigenvalues match an independent solver") {
    KoperParams p;
    auto cls = classify_equilibrium(jacobian({1.0, 1.0, 1.0}, p));
    CHECK(cls.stable);
    for (const auto& ev : cls.eigenvalues) CHECK(ev.real() < 0.0);

    Eigen::Matrix3d M;
    Mat3 J = jacobian({1.0, 1.0, 1.0}, p);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = J.m[i][j];
    Eigen::EigenSolver<Eigen::Matrix3d> solver(M);
    std::array<std::complex<double>, 3> oracle;
    for (int i = 0; i < 3; ++i) oracle[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);

    auto a = sorted(cls.eigenvalues);
    auto b = sorted(oracle);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) <= 1e-8);

    // Diagonal case.
    Mat3 minusI;
    for (int i = 0; i < 3; ++i) minusI.m[i][i] = -1.0;
    auto diag = classify_equilibrium(minusI);
    CHECK(diag.stable);
    for (const auto& ev : diag.eigenvalues) {
        CHECK(ev.real() == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(ev.imag() == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("classify_equilibrium against random matrices") {
    Rng rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        Mat3 J;
        Eigen::Matrix3d M;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                J.m[i][j] = 4.0 * rng.uniform01() - 2.0;
                M(i, j) = J.m[i][j];
            }
        auto cls = classify_equilibrium(J);
        Eigen::EigenSolver<Eigen::Matrix3d> solver(M);
        std::array<std::complex<double>, 3> oracle;
        for (int i = 0; i < 3; ++i) oracle[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        auto a = sorted(cls.eigenvalues);
        auto b = sorted(oracle);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) <= 1e-7);
    }
}

TEST_CASE("solve_cubic known factorizations") {
    // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6.
    auto real3 = sorted(solve_cubic(-6.0, 11.0, -6.0));
    CHECK(real3[0].real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(real3[1].real() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(real3[2].real() == doctest::Approx(3.0).epsilon(1e-10));
    for (const auto& r : real3) CHECK(std::abs(r.imag()) <= 1e-10);

    // (x+1)(x^2+1) = x^3 + x^2 + x + 1: roots -1, +-i.
    auto mixed = sorted(solve_cubic(1.0, 1.0, 1.0));
    CHECK(mixed[0].real() == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(mixed[1] - std::complex<double>(0.0, -1.0)) <= 1e-10);
    CHECK(std::abs(mixed[2] - std::complex<double>(0.0, 1.0)) <= 1e-10);
}

TEST_CASE("lipschitz estimates on the example box") {
    KoperParams p;
    Box box{-2.0, 2.0, -2.0, 2.0, -2.0, 2.0};
    auto e = estimate_lipschitz(p, box, 101);
    CHECK(e.dg1_dx == doctest::Approx(9.0).epsilon(1e-12));  // |3-3x^2| at x=+-2
    CHECK(e.dg1_dy == 10.0);                                 // |k|
    CHECK(e.dg1_dz == 5.0);                                  // |lambda1|
    CHECK(e.col_y == 13.0);
    CHECK(e.K_total == 13.0);

    CHECK_THROWS(estimate_lipschitz(p, Box{1, 0, 0, 1, 0, 1}, 10));  // empty box
    CHECK_THROWS(estimate_lipschitz(p, box, 1));                     // n_grid < 2
}

TEST_CASE("lipschitz estimate is monotone under box inclusion") {
    KoperParams p;
    double prev = 0.0;
    for (double r : {0.5, 1.0, 2.0, 3.0}) {
        auto e = estimate_lipschitz(p, Box{-r, r, -r, r, -r, r}, 41);
        CHECK(e.K_total >= prev);
        prev = e.K_total;
    }
}

TEST_CASE("cutoff drift closed-form constant matches the box estimate") {
    KoperParams p;
    p.cutoff_radius = 2.0;
    auto c = lipschitz_cutoff(p);
    CHECK(c.dg1_dx == 9.0);
    CHECK(c.K_total == 13.0);

    // Outside the cutoff radius the continuation is linear with matched slope.
    CHECK(cubic_part_dx(5.0, p) == cubic_part_dx(2.0, p));
    CHECK(cubic_part(2.0, p) == doctest::Approx(-2.0).epsilon(1e-14));
    // C^1 matching at the boundary.
    double h = 1e-7;
    double inner = cubic_part(2.0 - h, p);
    double outer = cubic_part(2.0 + h, p);
    CHECK(std::abs(outer - inner) <= 20.0 * h);

    // The global estimate over any box is never above the cutoff constant.
    auto wide = estimate_lipschitz(p, Box{-50, 50, 0, 1, 0, 1}, 1001);
    CHECK(wide.K_total <= c.K_total + 1e-12);

    KoperParams nocut;
    CHECK_THROWS_AS(lipschitz_cutoff(nocut), std::domain_error);
}

TEST_CASE("hypothesis audit") {
    KoperParams p;
    Box around0{-1.0, 1.0, -1.0, 1.0, -1.0, 1.0};
    auto a = audit_hypotheses(p, around0, 21);
    // H3 fails near x = 0 where d(cubic)/dx = +3.
    CHECK_FALSE(a.h3_holds);
    CHECK(a.h3_worst == doctest::Approx(3.0).epsilon(1e-12));
    // H2: the reported growth constant bounds |g|^2 at every checked point.
    CHECK(a.h2_growth_L > 0.0);
    for (double x : {-1.0, 0.0, 1.0})
        for (double y : {-1.0, 1.0})
            for (double z : {-1.0, 1.0}) {
                auto g = drift({x, y, z}, p);
                double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
                CHECK(g2 <= a.h2_growth_L * (1.0 + x * x + y * y + z * z) + 1e-9);
            }

    Box right{2.0, 3.0, 0.0, 1.0, 0.0, 1.0};
    auto b = audit_hypotheses(p, right, 21);
    CHECK(b.h3_holds);
    CHECK(b.h3_worst == doctest::Approx(-9.0).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
    KoperParams p;
    CHECK_NOTHROW(p.validate());
    p.eps = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.eps = 1.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = KoperParams{};
    p.sigma = -0.1;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p = KoperParams{};
    p.sigma = 0.5;
    p.alpha = 2.5;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
    p.sigma = 0.0;
    CHECK_NOTHROW(p.validate());  // alpha unused without noise
    p = KoperParams{};
    p.eps_hat = 0.0;
    CHECK_THROWS_AS(p.validate(), std::domain_error);
}

TEST_CASE("solve3 solves and rejects singular systems") {
    Mat3 A;
    double vals[3][3] = {{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A.m[i][j] = vals[i][j];
    auto x = solve3(A, {1.0, 2.0, 3.0});
    for (int i = 0; i < 3; ++i) {
        double r = 0.0;
        for (int j = 0; j < 3; ++j) r += A.m[i][j] * x[static_cast<std::size_t>(j)];
        CHECK(r == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-12));
    }
    Mat3 singular;  // rank 1
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) singular.m[i][j] = 1.0;
    CHECK_THROWS_AS(solve3(singular, {1.0, 1.0, 1.0}), std::runtime_error);
}
