// Symmetric alpha-stable sample paths: generation, shifting, and
// distributional checks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace koper {

// One standard symmetric alpha-stable variate from the Chambers-Mallows-Stuck
// transform. u must lie in (-pi/2, pi/2), w must be positive. Deterministic
// in its arguments; odd in u.
double sample_standard_stable(double alpha, double u, double w);

// Sampled two-sided cadlag path of a symmetric alpha-stable process,
// anchored at omega(0) = 0.
//
// The raw grid and raw values are never rebased; shifting only moves the
// anchor index, so the flow laws shift(.,0) = id and
// shift(shift(.,t1),t2) = shift(.,t1+t2) hold bit-exactly.
class StablePath {
public:
    StablePath() = default;

    std::size_t size() const { return raw_grid_.size(); }
    double alpha() const { return alpha_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t anchor() const { return anchor_; }

    // Time of grid point i, relative to the current anchor.
    double time(std::size_t i) const { return raw_grid_[i] - raw_grid_[anchor_]; }
    // Path value at grid point i; value at the anchor is exactly 0.
    double value_at(std::size_t i) const { return raw_values_[i] - raw_values_[anchor_]; }

    double t_min() const { return time(0); }
    double t_max() const { return time(size() - 1); }

    // Cadlag evaluation: value at the largest grid point <= t.
    // Throws std::out_of_range if t precedes the sampled support.
    double value(double t) const;

    // Index of the grid point equal to t (within a small matching
    // tolerance). Throws std::out_of_range if t is not a grid point.
    std::size_t index_of(double t) const;

    // Grid step, assuming a uniform grid.
    double step() const;

    friend StablePath sample_path(double alpha, const std::vector<double>& grid,
                                  std::uint64_t seed, double jump_cap);
    friend StablePath shift(const StablePath& path, double t);
    friend StablePath import_path(const std::vector<double>& grid,
                                  const std::vector<double>& values, double alpha,
                                  std::uint64_t seed);

private:
    std::vector<double> raw_grid_;
    std::vector<double> raw_values_;
    std::size_t anchor_ = 0;
    double alpha_ = 2.0;
    std::uint64_t seed_ = 0;
};

// Uniform grid over [t_min, t_max] with step dt, guaranteed to contain 0.
// Requires t_min <= 0 <= t_max.
std::vector<double> uniform_grid(double t_min, double t_max, double dt);

// Sample a path on the given grid (strictly increasing, containing 0).
// Increments over a step dt are scaled by dt^(1/alpha); the negative-time
// branch uses an independent seed-derived stream cumulated backward from 0.
// jump_cap > 0 clamps each scaled increment to [-jump_cap, jump_cap]
// (plotting aid; off when <= 0).
StablePath sample_path(double alpha, const std::vector<double>& grid,
                       std::uint64_t seed, double jump_cap = 0.0);

// Wrap externally supplied values (e.g. a CSV import) as a path.
StablePath import_path(const std::vector<double>& grid,
                       const std::vector<double>& values, double alpha,
                       std::uint64_t seed);

// (theta_t omega)(s) = omega(s+t) - omega(t); t must be a grid point.
StablePath shift(const StablePath& path, double t);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
// Throws std::runtime_error if either sample is degenerate (all equal).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// n endpoint values c^(-1/alpha) * omega_i(c), one independent path per i.
std::vector<double> stable_endpoint_sample(double alpha, double c, int n,
                                           std::uint64_t seed, int steps = 16);

// Self-similarity check: compares {c^(-1/alpha) omega_i(c)} against
// {omega'_i(1)} over independent paths.
KsResult ks_self_similarity(double alpha, double c, int n_samples,
                            std::uint64_t seed);

}  // namespace koper
