#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "foliage/lsystem.hpp"
#include "foliage/treegen.hpp"
#include "foliage/vec3.hpp"

namespace foliage {

/// Axis-aligned ground-plane rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

/// Inhomogeneous Poisson point process over a rectangle, sampled by thinning.
struct IppConfig {
    Rect domain{0.0, 0.0, 100.0, 100.0};
    std::function<double(double, double)> intensity; ///< points per unit area
    double lambda_max = 0.0;                         ///< upper bound on intensity over the domain
    std::uint64_t seed = 0;
};

void validate(const IppConfig& cfg);

/// Point locations on the ground plane. Every intensity evaluation is checked
/// against [0, lambda_max]; a violation raises a validation error.
std::vector<Vec2> sample_ipp(const IppConfig& cfg);

struct SonarPose {
    Vec3 position;
    Vec3 boresight;
    double beamwidth_deg = 20.0;
};

/// Right-handed sonar frame: x = boresight, z roughly world-up.
struct SonarFrame {
    Vec3 x, y, z;
};

SonarFrame sonar_frame(const Vec3& boresight);

/// One leaf facet as seen from a sonar pose.
struct FacetObservation {
    double r = 0.0;      ///< range, m
    double az = 0.0;     ///< azimuth in the sonar frame, rad
    double el = 0.0;     ///< elevation in the sonar frame, rad
    double beta = 0.0;   ///< incidence angle between facet normal and the sonar direction, [0, pi/2]
    double radius = 0.0; ///< facet disk radius, m
    int disk = 0;        ///< index into Scene::disks, tie-break for equal ranges
};

struct TreePlacement {
    Vec2 position;
    double yaw = 0.0;
    std::uint64_t seed = 0;
};

/// Everything needed to regenerate the scene from its file representation.
struct SceneBuildInputs {
    std::uint64_t master_seed = 0;
    Rect domain;
    std::filesystem::path reference_path;
    LSystemSpec lsystem;
    RandomizationParams randomization; ///< per-tree seed is overridden per placement
};

struct Bvh {
    struct Node {
        Vec3 center;
        double radius = 0.0; ///< bounding sphere over member disks
        int left = -1;
        int right = -1;
        int first = 0;
        int count = 0; ///< > 0 marks a leaf over order[first .. first+count)
    };
    std::vector<Node> nodes;
    std::vector<int> order;
};

struct Scene {
    SceneBuildInputs inputs;
    std::vector<TreePlacement> placements;
    std::vector<TreeGeometry> trees; ///< world-space, one per placement
    std::vector<LeafDisk> disks;     ///< world-space leaf facets, all trees concatenated
    Bvh bvh;
};

/// Instantiates one randomized tree per position (seed and yaw derived from
/// inputs.master_seed by position index) and indexes all leaf facets.
Scene build_scene(const std::vector<Vec2>& positions, const ReferenceTree& ref,
                  const std::vector<BranchAttachment>& attachments, const SceneBuildInputs& inputs);

/// Facets inside the main lobe: sqrt(az^2 + el^2) <= beamwidth/2, sorted by
/// (range, disk index). Beamwidth must lie in (0, 180) degrees.
std::vector<FacetObservation> facets_in_main_lobe(const Scene& scene, const SonarPose& pose);

/// Same predicate with no acceleration; kept as the reference implementation.
std::vector<FacetObservation> facets_in_main_lobe_scan(const Scene& scene, const SonarPose& pose);

Vec2 mean_tree_position(const Scene& scene); ///< error when the scene holds no trees
double mean_tree_height(const Scene& scene);

/// Versioned scene file: placement seeds and yaws are recorded so loading
/// regenerates identical geometry. reference_path is stored relative to the
/// scene file when possible.
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

} // namespace foliage
