#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "foliage/acoustics.hpp"
#include "foliage/scene.hpp"

namespace foliage {

/// Circular path in a horizontal plane, poses aimed at the center.
struct CirclePath {
    std::optional<Vec2> center;   ///< default: mean tree position of the scene
    double radius = 6.2;          ///< m
    std::optional<double> height; ///< m; default: half the mean tree height
    int points = 15;
    double interval_deg = 24.0;
};

/// Straight path, poses aimed along the direction of travel.
struct LinePath {
    Vec3 start;
    Vec3 end;
    int points = 2;
};

struct TrajectorySpec {
    std::variant<CirclePath, LinePath> path = CirclePath{};
    double beamwidth_deg = 20.0;
};

void validate(const TrajectorySpec& spec);

/// Expands the path into sonar poses. Circle poses sit at angles 0,
/// interval, 2*interval, ... with horizontal boresights toward the center.
/// Auto-center and auto-height need a non-empty scene.
std::vector<SonarPose> poses_from_spec(const TrajectorySpec& spec, const Scene& scene);

struct RunPoint {
    SonarPose pose;
    std::size_t facet_count = 0;
    ImpulseResponse impulse;
    double wall_s = 0.0;
};

struct RunReport {
    std::vector<RunPoint> points; ///< pose order, independent of worker count
    double total_wall_s = 0.0;    ///< end-to-end batch wall time
    std::size_t point_count = 0;
    std::size_t tree_count = 0;
};

/// Facet query, spectrum assembly, and impulse synthesis at every pose.
/// Poses fan out across `threads` workers (0 = auto); signals do not depend
/// on the worker count. Timings cover only the impulse pipeline.
RunReport run_trajectory(const TrajectorySpec& spec, const Scene& scene, const AcousticConfig& cfg,
                         const LeafBeampatternParams& leaf, int threads);

struct TimingTable {
    std::vector<int> point_counts;
    std::vector<int> tree_counts;
    std::vector<std::vector<double>> median_s; ///< [point index][tree index]
    bool monotone_in_points = false;
    bool monotone_in_trees = false;
};

/// Median-of-`repetitions` impulse-pipeline wall times over the grid of
/// point counts x tree counts. Tree positions for a count T are the first T
/// of one fixed cluster sample, so larger counts strictly add geometry;
/// repetitions are interleaved across cells to decorrelate drift.
TimingTable timing_sweep(const std::vector<int>& point_counts, const std::vector<int>& tree_counts,
                         const TrajectorySpec& base, const AcousticConfig& cfg,
                         const LeafBeampatternParams& leaf, const ReferenceTree& ref,
                         const std::vector<BranchAttachment>& attachments,
                         const SceneBuildInputs& scene_inputs, int repetitions, int threads);

} // namespace foliage
