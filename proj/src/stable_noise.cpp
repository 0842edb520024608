#include "koper/stable_noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "koper/rng.hpp"

namespace koper {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kGridTol = 1e-9;
}  // namespace

double sample_standard_stable(double alpha, double u, double w) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::domain_error("sample_standard_stable: alpha must be in (0,2]");
    if (!(u > -kPi / 2.0 && u < kPi / 2.0))
        throw std::domain_error("sample_standard_stable: u must be in (-pi/2,pi/2)");
    if (!(w > 0.0))
        throw std::domain_error("sample_standard_stable: w must be positive");

    if (alpha == 2.0) return 2.0 * std::sin(u) * std::sqrt(w);
    if (alpha == 1.0) return std::tan(u);

    // Symmetric (beta = 0) Chambers-Mallows-Stuck transform.
    double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
    double t = std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return s * t;
}

double StablePath::value(double t) const {
    if (t < t_min() - kGridTol)
        throw std::out_of_range("StablePath::value: t precedes sampled support");
    if (t > t_max() + kGridTol)
        throw std::out_of_range("StablePath::value: t beyond sampled support");
    // Largest grid index with time(i) <= t.
    double target = t + raw_grid_[anchor_];
    auto it = std::upper_bound(raw_grid_.begin(), raw_grid_.end(), target + kGridTol);
    std::size_t i = static_cast<std::size_t>(it - raw_grid_.begin());
    if (i == 0) i = 1;
    return value_at(i - 1);
}

std::size_t StablePath::index_of(double t) const {
    double target = t + raw_grid_[anchor_];
    auto it = std::lower_bound(raw_grid_.begin(), raw_grid_.end(), target - kGridTol);
    if (it == raw_grid_.end() || std::abs(*it - target) > kGridTol)
        throw std::out_of_range("StablePath::index_of: t is not a grid point");
    return static_cast<std::size_t>(it - raw_grid_.begin());
}

double StablePath::step() const {
    if (size() < 2) throw std::logic_error("StablePath::step: single-point grid");
    return raw_grid_[1] - raw_grid_[0];
}

std::vector<double> uniform_grid(double t_min, double t_max, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("uniform_grid: dt must be positive");
    if (t_min > 0.0 || t_max < 0.0)
        throw std::invalid_argument("uniform_grid: interval must contain 0");
    auto n_neg = static_cast<long>(std::ceil(-t_min / dt - kGridTol));
    auto n_pos = static_cast<long>(std::ceil(t_max / dt - kGridTol));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n_neg + n_pos + 1));
    for (long i = -n_neg; i <= n_pos; ++i) g.push_back(static_cast<double>(i) * dt);
    return g;
}

namespace {

// One standard variate drawn from the stream.
double draw_stable(Rng& rng, double alpha) {
    double u = rng.uniform_angle();
    double w = rng.exponential();
    return sample_standard_stable(alpha, u, w);
}

std::size_t locate_zero(const std::vector<double>& grid) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i]) <= kGridTol) return i;
    throw std::invalid_argument("sample_path: grid must contain 0");
}

}  // namespace

StablePath sample_path(double alpha, const std::vector<double>& grid,
                       std::uint64_t seed, double jump_cap) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::domain_error("sample_path: alpha must be in (0,2]");
    if (grid.empty()) throw std::invalid_argument("sample_path: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("sample_path: grid not strictly increasing");
    std::size_t zero = locate_zero(grid);

    StablePath p;
    p.raw_grid_ = grid;
    p.raw_values_.assign(grid.size(), 0.0);
    p.anchor_ = zero;
    p.alpha_ = alpha;
    p.seed_ = seed;

    auto increment = [&](Rng& rng, double dt) {
        double inc = std::pow(dt, 1.0 / alpha) * draw_stable(rng, alpha);
        if (jump_cap > 0.0) inc = std::clamp(inc, -jump_cap, jump_cap);
        return inc;
    };

    // Forward branch.
    {
        Rng rng(derive_seed(seed, 0));
        for (std::size_t i = zero + 1; i < grid.size(); ++i)
            p.raw_values_[i] = p.raw_values_[i - 1] + increment(rng, grid[i] - grid[i - 1]);
    }
    // Backward branch, independent stream, cumulated backward from 0.
    {
        Rng rng(derive_seed(seed, 1));
        for (std::size_t i = zero; i > 0; --i)
            p.raw_values_[i - 1] = p.raw_values_[i] - increment(rng, grid[i] - grid[i - 1]);
    }
    for (double v : p.raw_values_)
        if (!std::isfinite(v)) throw std::runtime_error("sample_path: non-finite value");
    return p;
}

StablePath import_path(const std::vector<double>& grid,
                       const std::vector<double>& values, double alpha,
                       std::uint64_t seed) {
    if (grid.size() != values.size() || grid.empty())
        throw std::invalid_argument("import_path: grid/value size mismatch");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("import_path: grid not strictly increasing");
    std::size_t zero = locate_zero(grid);
    if (std::abs(values[zero]) > 1e-12)
        throw std::invalid_argument("import_path: value at t=0 must be 0");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("import_path: non-finite value");
    StablePath p;
    p.raw_grid_ = grid;
    p.raw_values_ = values;
    p.anchor_ = zero;
    p.alpha_ = alpha;
    p.seed_ = seed;
    return p;
}

StablePath shift(const StablePath& path, double t) {
    StablePath out = path;
    out.anchor_ = path.index_of(t);
    return out;
}

namespace {

// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_q(double lambda) {
    if (lambda < 1e-12) return 1.0;
    double sum = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

bool degenerate(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::runtime_error("ks_two_sample: need at least 2 points per sample");
    if (degenerate(a) || degenerate(b))
        throw std::runtime_error("ks_two_sample: degenerate sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double xa = a[i], xb = b[j];
        if (xa <= xb) ++i;
        if (xb <= xa) ++j;
        double fa = static_cast<double>(i) / na;
        double fb = static_cast<double>(j) / nb;
        d = std::max(d, std::abs(fa - fb));
    }
    double ne = na * nb / (na + nb);
    double sq = std::sqrt(ne);
    double lambda = (sq + 0.12 + 0.11 / sq) * d;
    return {d, kolmogorov_q(lambda)};
}

std::vector<double> stable_endpoint_sample(double alpha, double c, int n,
                                           std::uint64_t seed, int steps) {
    if (!(c > 0.0)) throw std::domain_error("stable_endpoint_sample: c must be positive");
    if (steps < 1) throw std::invalid_argument("stable_endpoint_sample: steps < 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    double scale = std::pow(c, -1.0 / alpha);
    std::vector<double> grid = uniform_grid(0.0, c, c / steps);
    for (int i = 0; i < n; ++i) {
        StablePath p = sample_path(alpha, grid, derive_seed(seed, static_cast<std::uint64_t>(i)));
        out.push_back(scale * p.value_at(p.size() - 1));
    }
    return out;
}

KsResult ks_self_similarity(double alpha, double c, int n_samples, std::uint64_t seed) {
    if (n_samples < 100)
        throw std::invalid_argument("ks_self_similarity: need n_samples >= 100");
    auto a = stable_endpoint_sample(alpha, c, n_samples, derive_seed(seed, 101));
    auto b = stable_endpoint_sample(alpha, 1.0, n_samples, derive_seed(seed, 202));
    return ks_two_sample(std::move(a), std::move(b));
}

}  // namespace koper
