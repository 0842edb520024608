// CSV readers/writers for paths, trajectories, manifold graphs, and
// equilibrium reports.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "koper/integrators.hpp"
#include "koper/model.hpp"
#include "koper/slow_manifold.hpp"
#include "koper/stable_noise.hpp"

namespace koper {

// Fixed numeric formatting shared by all writers so identical inputs give
// byte-identical files.
std::string format_number(double v);

void write_path_csv(const std::filesystem::path& file, const StablePath& path);
StablePath read_path_csv(const std::filesystem::path& file, double alpha,
                         std::uint64_t seed);

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj);

void write_manifold_csv(const std::filesystem::path& file, const ManifoldGraph& g);

struct EquilibriumRow {
    double eps;
    EquilibriumClass cls;
};
void write_equilibrium_csv(const std::filesystem::path& file,
                           const std::vector<EquilibriumRow>& rows);

void write_series_csv(const std::filesystem::path& file,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

}  // namespace koper
