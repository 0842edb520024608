// Preset experiment runners producing CSV/SVG artifact sets with a
// manifest for byte-identical re-runs.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "koper/config.hpp"
#include "koper/slow_manifold.hpp"

namespace koper {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ArtifactSet {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
    // Per-run notes (blow-ups, deviations) echoed into the manifest.
    std::vector<std::string> notes;
};

ArtifactSet run_fig1(const ExperimentConfig& config);
ArtifactSet run_fig2(const ExperimentConfig& config);
ArtifactSet run_fig3(const ExperimentConfig& config);
ArtifactSet run_manifold(const ExperimentConfig& config);
ArtifactSet run_tracking(const ExperimentConfig& config);
ArtifactSet run_simulate(const ExperimentConfig& config);
ArtifactSet run_analyze_equilibrium(const ExperimentConfig& config);

// Dispatch on config.preset.
ArtifactSet run_preset(const ExperimentConfig& config);

}  // namespace koper
