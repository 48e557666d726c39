#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include <json.hpp>

#include "foliage/acoustics.hpp"
#include "foliage/io.hpp"
#include "foliage/scene.hpp"
#include "foliage/trajectory.hpp"

namespace foliage {

struct TimingConfig {
    std::vector<int> point_counts{1, 5, 10, 15};
    std::vector<int> tree_counts{1, 2, 3, 4, 5};
    int repetitions = 5;
};

/// Point-process settings as written in a config file; the intensity is
/// either a constant or a gridded CSV, defaulting to a homogeneous process
/// at lambda_max.
struct IppSettings {
    Rect domain{0.0, 0.0, 20.0, 20.0};
    double lambda_max = 0.05;
    std::optional<double> constant;
    std::optional<std::filesystem::path> csv_path;
    std::shared_ptr<IntensityGrid> grid; ///< loaded when csv_path is set
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> output_dir;
    std::filesystem::path reference_tree;
    LSystemSpec lsystem;
    RandomizationParams randomization;
    IppSettings ipp;
    AcousticConfig acoustic;
    LeafBeampatternParams leaf;
    TrajectorySpec trajectory;
    TimingConfig timing;
    nlohmann::json raw;           ///< config file content, echoed into run manifests
    std::filesystem::path source; ///< the config file itself
};

/// Strict loader: unknown keys anywhere are errors; relative paths resolve
/// against the config file's directory; the reference tree must exist.
RunConfig load_config(const std::filesystem::path& path);

/// Point-process config with the intensity function materialized.
IppConfig make_ipp_config(const RunConfig& cfg);

} // namespace foliage
