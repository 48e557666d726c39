#include "foliage/trajectory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "foliage/errors.hpp"
#include "foliage/rng.hpp"
#include "foliage/threading.hpp"

namespace foliage {

void validate(const TrajectorySpec& spec) {
    if (!(spec.beamwidth_deg > 0.0) || !(spec.beamwidth_deg < 180.0)) {
        throw ValidationError("trajectory: beamwidth must lie in (0, 180) degrees");
    }
    if (const auto* circle = std::get_if<CirclePath>(&spec.path)) {
        if (circle->points < 1) throw ValidationError("trajectory: point count must be >= 1");
        if (!(circle->radius > 0.0)) throw ValidationError("trajectory: circle radius must be > 0");
    } else {
        const auto& line = std::get<LinePath>(spec.path);
        if (line.points < 1) throw ValidationError("trajectory: point count must be >= 1");
        if (!(norm(line.end - line.start) > 0.0)) {
            throw ValidationError("trajectory: line start and end coincide");
        }
    }
}

std::vector<SonarPose> poses_from_spec(const TrajectorySpec& spec, const Scene& scene) {
    validate(spec);
    std::vector<SonarPose> poses;

    if (const auto* circle = std::get_if<CirclePath>(&spec.path)) {
        const Vec2 center = circle->center ? *circle->center : mean_tree_position(scene);
        const double height = circle->height ? *circle->height : 0.5 * mean_tree_height(scene);
        poses.reserve(static_cast<std::size_t>(circle->points));
        for (int i = 0; i < circle->points; ++i) {
            const double angle = static_cast<double>(i) * circle->interval_deg * std::numbers::pi / 180.0;
            const double cos_a = std::cos(angle);
            const double sin_a = std::sin(angle);
            SonarPose pose;
            pose.position = {center.x + circle->radius * cos_a, center.y + circle->radius * sin_a, height};
            pose.boresight = {-cos_a, -sin_a, 0.0};
            pose.beamwidth_deg = spec.beamwidth_deg;
            poses.push_back(pose);
        }
    } else {
        const auto& line = std::get<LinePath>(spec.path);
        const Vec3 direction = normalized(line.end - line.start);
        poses.reserve(static_cast<std::size_t>(line.points));
        for (int i = 0; i < line.points; ++i) {
            const double t =
                line.points > 1 ? static_cast<double>(i) / static_cast<double>(line.points - 1) : 0.0;
            SonarPose pose;
            pose.position = line.start + (line.end - line.start) * t;
            pose.boresight = direction;
            pose.beamwidth_deg = spec.beamwidth_deg;
            poses.push_back(pose);
        }
    }
    return poses;
}

RunReport run_trajectory(const TrajectorySpec& spec, const Scene& scene, const AcousticConfig& cfg,
                         const LeafBeampatternParams& leaf, int threads) {
    validate(cfg);
    validate(leaf);
    const std::vector<SonarPose> poses = poses_from_spec(spec, scene);
    const SonarBeampatternParams sonar =
        SonarBeampatternParams::from_beamwidth(spec.beamwidth_deg * std::numbers::pi / 180.0, cfg.amplitude);

    RunReport report;
    report.points.resize(poses.size());
    report.point_count = poses.size();
    report.tree_count = scene.placements.size();

    using clock = std::chrono::steady_clock;
    const auto batch_start = clock::now();
    parallel_for(poses.size(), threads, [&](std::size_t i) {
        const auto start = clock::now();
        RunPoint& point = report.points[i];
        point.pose = poses[i];
        const std::vector<FacetObservation> facets = facets_in_main_lobe(scene, poses[i]);
        point.facet_count = facets.size();
        const Spectrum spectrum = assemble_spectrum(facets, cfg, sonar, leaf);
        point.impulse = synthesize_impulse(spectrum, cfg);
        point.wall_s = std::chrono::duration<double>(clock::now() - start).count();
    });
    report.total_wall_s = std::chrono::duration<double>(clock::now() - batch_start).count();
    return report;
}

TimingTable timing_sweep(const std::vector<int>& point_counts, const std::vector<int>& tree_counts,
                         const TrajectorySpec& base, const AcousticConfig& cfg,
                         const LeafBeampatternParams& leaf, const ReferenceTree& ref,
                         const std::vector<BranchAttachment>& attachments,
                         const SceneBuildInputs& scene_inputs, int repetitions, int threads) {
    if (point_counts.empty() || tree_counts.empty()) {
        throw ValidationError("timing sweep: point and tree count lists must be non-empty");
    }
    for (int p : point_counts) {
        if (p < 1) throw ValidationError("timing sweep: point counts must be >= 1");
    }
    for (int t : tree_counts) {
        if (t < 1) throw ValidationError("timing sweep: tree counts must be >= 1");
    }
    if (repetitions < 1) throw ValidationError("timing sweep: repetitions must be >= 1");
    if (!std::holds_alternative<CirclePath>(base.path)) {
        throw ValidationError("timing sweep: base trajectory must be circular");
    }

    // One cluster sample for the largest count; smaller counts take a prefix
    // so added trees only ever add geometry.
    const int max_trees = *std::max_element(tree_counts.begin(), tree_counts.end());
    const Vec2 domain_center{0.5 * (scene_inputs.domain.x0 + scene_inputs.domain.x1),
                             0.5 * (scene_inputs.domain.y0 + scene_inputs.domain.y1)};
    Rng cluster_rng(derive_seed(scene_inputs.master_seed, SeedStream::SweepScene, 0));
    std::vector<Vec2> positions;
    positions.reserve(static_cast<std::size_t>(max_trees));
    constexpr double kClusterRadius = 2.0;
    for (int i = 0; i < max_trees; ++i) {
        const double r = kClusterRadius * std::sqrt(cluster_rng.uniform());
        const double theta = cluster_rng.uniform(0.0, 2.0 * std::numbers::pi);
        positions.push_back({domain_center.x + r * std::cos(theta), domain_center.y + r * std::sin(theta)});
    }

    CirclePath base_circle = std::get<CirclePath>(base.path);
    if (!base_circle.center) base_circle.center = domain_center;
    if (!base_circle.height) base_circle.height = 1.0;

    std::vector<Scene> scenes;
    scenes.reserve(tree_counts.size());
    for (int t : tree_counts) {
        const std::vector<Vec2> prefix(positions.begin(), positions.begin() + t);
        scenes.push_back(build_scene(prefix, ref, attachments, scene_inputs));
    }

    TimingTable table;
    table.point_counts = point_counts;
    table.tree_counts = tree_counts;
    std::vector<std::vector<std::vector<double>>> samples(
        point_counts.size(), std::vector<std::vector<double>>(tree_counts.size()));

    for (int rep = 0; rep < repetitions; ++rep) {
        for (std::size_t pi = 0; pi < point_counts.size(); ++pi) {
            for (std::size_t ti = 0; ti < tree_counts.size(); ++ti) {
                TrajectorySpec spec = base;
                CirclePath circle = base_circle;
                circle.points = point_counts[pi];
                circle.interval_deg = 360.0 / static_cast<double>(point_counts[pi]);
                spec.path = circle;
                const RunReport report = run_trajectory(spec, scenes[ti], cfg, leaf, threads);
                samples[pi][ti].push_back(report.total_wall_s);
            }
        }
    }

    table.median_s.assign(point_counts.size(), std::vector<double>(tree_counts.size(), 0.0));
    for (std::size_t pi = 0; pi < point_counts.size(); ++pi) {
        for (std::size_t ti = 0; ti < tree_counts.size(); ++ti) {
            auto& cell = samples[pi][ti];
            std::sort(cell.begin(), cell.end());
            table.median_s[pi][ti] = cell[cell.size() / 2];
        }
    }

    table.monotone_in_points = true;
    table.monotone_in_trees = true;
    for (std::size_t pi = 0; pi < point_counts.size(); ++pi) {
        for (std::size_t ti = 0; ti < tree_counts.size(); ++ti) {
            if (pi > 0 && table.median_s[pi][ti] < table.median_s[pi - 1][ti]) {
                table.monotone_in_points = false;
            }
            if (ti > 0 && table.median_s[pi][ti] < table.median_s[pi][ti - 1]) {
                table.monotone_in_trees = false;
            }
        }
    }
    return table;
}

} // namespace foliage
