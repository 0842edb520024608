// Minimal native SVG output: time-series charts, isometric 3-D path
// projections, and manifold heatmaps. No external plotting dependency.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "koper/integrators.hpp"
#include "koper/slow_manifold.hpp"

namespace koper {

struct Series {
    std::string label;
    std::string color;
    const std::vector<double>* values;
};

void write_timeseries_svg(const std::filesystem::path& file,
                          const std::vector<double>& times,
                          const std::vector<Series>& series,
                          const std::string& title);

// Fixed isometric projection: u = (x - y) * sqrt(3)/2, v = (x + y)/2 - z.
void write_path3d_svg(const std::filesystem::path& file, const Trajectory& traj,
                      const std::string& title);

void write_heatmap_svg(const std::filesystem::path& file, const ManifoldGraph& g,
                       const std::string& title);

}  // namespace koper
