#include "foliage/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>

#include <json.hpp>

#include "foliage/errors.hpp"
#include "foliage/rng.hpp"
#include "foliage/serialize.hpp"

namespace foliage {

void validate(const IppConfig& cfg) {
    if (!(cfg.domain.width() > 0.0) || !(cfg.domain.height() > 0.0)) {
        throw ValidationError("point process: domain rectangle is degenerate");
    }
    if (!(cfg.lambda_max > 0.0)) throw ValidationError("point process: lambda_max must be > 0");
    if (!cfg.intensity) throw ValidationError("point process: intensity function not set");
    constexpr int kProbe = 33;
    for (int iy = 0; iy < kProbe; ++iy) {
        for (int ix = 0; ix < kProbe; ++ix) {
            const double x = cfg.domain.x0 + cfg.domain.width() * ix / (kProbe - 1);
            const double y = cfg.domain.y0 + cfg.domain.height() * iy / (kProbe - 1);
            const double lam = cfg.intensity(x, y);
            if (!(lam >= 0.0) || lam > cfg.lambda_max) {
                throw ValidationError("point process: intensity outside [0, lambda_max] at (" +
                                      std::to_string(x) + ", " + std::to_string(y) + ")");
            }
        }
    }
}

std::vector<Vec2> sample_ipp(const IppConfig& cfg) {
    validate(cfg);
    Rng rng(derive_seed(cfg.seed, SeedStream::Ipp, 0));
    const std::uint64_t candidates = rng.poisson(cfg.lambda_max * cfg.domain.area());
    std::vector<Vec2> points;
    points.reserve(static_cast<std::size_t>(candidates / 2));
    for (std::uint64_t i = 0; i < candidates; ++i) {
        const double x = rng.uniform(cfg.domain.x0, cfg.domain.x1);
        const double y = rng.uniform(cfg.domain.y0, cfg.domain.y1);
        const double lam = cfg.intensity(x, y);
        if (!(lam >= 0.0) || lam > cfg.lambda_max) {
            throw ValidationError("point process: intensity outside [0, lambda_max] at (" +
                                  std::to_string(x) + ", " + std::to_string(y) + ")");
        }
        const double u = rng.uniform();
        if (u * cfg.lambda_max < lam) points.push_back({x, y});
    }
    return points;
}

SonarFrame sonar_frame(const Vec3& boresight) {
    if (!(norm(boresight) > 0.0)) throw ValidationError("sonar pose: boresight is a zero vector");
    SonarFrame f;
    f.x = normalized(boresight);
    Vec3 up{0.0, 0.0, 1.0};
    if (std::abs(dot(f.x, up)) > 1.0 - 1e-9) up = {1.0, 0.0, 0.0};
    f.y = normalized(cross(up, f.x));
    f.z = cross(f.x, f.y);
    return f;
}

namespace {

TreeGeometry place_tree(TreeGeometry tree, const Vec2& position, double yaw) {
    const Mat3 rot = Mat3::rotation_z(yaw);
    const Vec3 offset{position.x, position.y, 0.0};
    for (auto& branch : tree.branches) {
        for (auto& p : branch.points) p = rot * p + offset;
    }
    for (auto& leaf : tree.leaves) {
        leaf.center = rot * leaf.center + offset;
        leaf.normal = rot * leaf.normal;
    }
    tree.bounding_center = rot * tree.bounding_center + offset;
    return tree;
}

constexpr int kBvhLeafSize = 8;

Bvh build_bvh(const std::vector<LeafDisk>& disks) {
    Bvh bvh;
    bvh.order.resize(disks.size());
    std::iota(bvh.order.begin(), bvh.order.end(), 0);
    if (disks.empty()) return bvh;

    const std::function<int(int, int)> build = [&](int first, int count) -> int {
        const int node_idx = static_cast<int>(bvh.nodes.size());
        bvh.nodes.emplace_back();

        Vec3 lo = disks[static_cast<std::size_t>(bvh.order[static_cast<std::size_t>(first)])].center;
        Vec3 hi = lo;
        for (int i = first; i < first + count; ++i) {
            const Vec3& c = disks[static_cast<std::size_t>(bvh.order[static_cast<std::size_t>(i)])].center;
            lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
            hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
        }
        const Vec3 center = (lo + hi) * 0.5;
        double radius = 0.0;
        for (int i = first; i < first + count; ++i) {
            const LeafDisk& d = disks[static_cast<std::size_t>(bvh.order[static_cast<std::size_t>(i)])];
            radius = std::max(radius, distance(center, d.center) + d.radius);
        }
        bvh.nodes[static_cast<std::size_t>(node_idx)].center = center;
        bvh.nodes[static_cast<std::size_t>(node_idx)].radius = radius;

        if (count <= kBvhLeafSize) {
            bvh.nodes[static_cast<std::size_t>(node_idx)].first = first;
            bvh.nodes[static_cast<std::size_t>(node_idx)].count = count;
            return node_idx;
        }

        const Vec3 extent = hi - lo;
        int axis = 0;
        if (extent.y > extent.x) axis = 1;
        if (extent.z > (axis == 0 ? extent.x : extent.y)) axis = 2;
        auto key = [&](int disk_idx) {
            const Vec3& c = disks[static_cast<std::size_t>(disk_idx)].center;
            return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
        };
        const int mid = first + count / 2;
        std::nth_element(bvh.order.begin() + first, bvh.order.begin() + mid, bvh.order.begin() + first + count,
                         [&](int a, int b) { return key(a) < key(b); });

        const int left = build(first, mid - first);
        const int right = build(mid, first + count - mid);
        bvh.nodes[static_cast<std::size_t>(node_idx)].left = left;
        bvh.nodes[static_cast<std::size_t>(node_idx)].right = right;
        return node_idx;
    };
    build(0, static_cast<int>(disks.size()));
    return bvh;
}

std::optional<FacetObservation> observe_disk(const LeafDisk& disk, int disk_idx, const SonarPose& pose,
                                             const SonarFrame& frame, double half_rad) {
    const Vec3 dvec = disk.center - pose.position;
    const double r = norm(dvec);
    if (r <= 1e-12) return std::nullopt;
    const double dx = dot(dvec, frame.x);
    const double dy = dot(dvec, frame.y);
    const double dz = dot(dvec, frame.z);
    const double az = std::atan2(dy, dx);
    const double el = std::atan2(dz, std::hypot(dx, dy));
    if (std::hypot(az, el) > half_rad) return std::nullopt;

    const Vec3 to_sonar = dvec * (-1.0 / r);
    const double cos_beta = std::clamp(std::abs(dot(disk.normal, to_sonar)), 0.0, 1.0);

    FacetObservation obs;
    obs.r = r;
    obs.az = az;
    obs.el = el;
    obs.beta = std::acos(cos_beta);
    obs.radius = disk.radius;
    obs.disk = disk_idx;
    return obs;
}

double half_angle_rad(const SonarPose& pose) {
    if (!(pose.beamwidth_deg > 0.0) || !(pose.beamwidth_deg < 180.0)) {
        throw ValidationError("sonar pose: beamwidth must lie in (0, 180) degrees");
    }
    return 0.5 * pose.beamwidth_deg * std::numbers::pi / 180.0;
}

void sort_observations(std::vector<FacetObservation>& out) {
    std::sort(out.begin(), out.end(), [](const FacetObservation& a, const FacetObservation& b) {
        if (a.r != b.r) return a.r < b.r;
        return a.disk < b.disk;
    });
}

/// True when no point of the sphere can lie within `half_rad` of the axis.
/// The sphere subtends a cone of half-angle asin(radius / dist) about the
/// direction to its center, so the bound is exact.
bool sphere_outside_cone(const Vec3& center, double radius, const SonarPose& pose, const Vec3& axis,
                         double half_rad) {
    const Vec3 dvec = center - pose.position;
    const double dist = norm(dvec);
    if (dist <= radius) return false;
    const double cos_ang = std::clamp(dot(axis, dvec) / dist, -1.0, 1.0);
    const double ang = std::acos(cos_ang);
    const double spread = std::asin(std::clamp(radius / dist, 0.0, 1.0));
    return ang - spread > half_rad;
}

} // namespace

std::vector<FacetObservation> facets_in_main_lobe(const Scene& scene, const SonarPose& pose) {
    const double half = half_angle_rad(pose);
    const SonarFrame frame = sonar_frame(pose.boresight);
    std::vector<FacetObservation> out;
    if (scene.bvh.nodes.empty()) return out;

    std::vector<int> stack{0};
    while (!stack.empty()) {
        const Bvh::Node& node = scene.bvh.nodes[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (sphere_outside_cone(node.center, node.radius, pose, frame.x, half)) continue;
        if (node.count > 0) {
            for (int i = node.first; i < node.first + node.count; ++i) {
                const int disk_idx = scene.bvh.order[static_cast<std::size_t>(i)];
                if (auto obs = observe_disk(scene.disks[static_cast<std::size_t>(disk_idx)], disk_idx, pose,
                                            frame, half)) {
                    out.push_back(*obs);
                }
            }
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    sort_observations(out);
    return out;
}

std::vector<FacetObservation> facets_in_main_lobe_scan(const Scene& scene, const SonarPose& pose) {
    const double half = half_angle_rad(pose);
    const SonarFrame frame = sonar_frame(pose.boresight);
    std::vector<FacetObservation> out;
    for (std::size_t i = 0; i < scene.disks.size(); ++i) {
        if (auto obs = observe_disk(scene.disks[i], static_cast<int>(i), pose, frame, half)) {
            out.push_back(*obs);
        }
    }
    sort_observations(out);
    return out;
}

namespace {

void finalize_scene(Scene& scene) {
    scene.disks.clear();
    for (const auto& tree : scene.trees) {
        scene.disks.insert(scene.disks.end(), tree.leaves.begin(), tree.leaves.end());
    }
    scene.bvh = build_bvh(scene.disks);
}

} // namespace

Scene build_scene(const std::vector<Vec2>& positions, const ReferenceTree& ref,
                  const std::vector<BranchAttachment>& attachments, const SceneBuildInputs& inputs) {
    Scene scene;
    scene.inputs = inputs;
    scene.placements.reserve(positions.size());
    scene.trees.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        TreePlacement placement;
        placement.position = positions[i];
        placement.seed = derive_seed(inputs.master_seed, SeedStream::Tree, i);
        Rng yaw_rng(derive_seed(inputs.master_seed, SeedStream::Yaw, i));
        placement.yaw = yaw_rng.uniform(0.0, 2.0 * std::numbers::pi);

        RandomizationParams params = inputs.randomization;
        params.seed = placement.seed;
        scene.trees.push_back(place_tree(randomize_tree(ref, attachments, params), placement.position,
                                         placement.yaw));
        scene.placements.push_back(placement);
    }
    finalize_scene(scene);
    return scene;
}

Vec2 mean_tree_position(const Scene& scene) {
    if (scene.placements.empty()) throw ValidationError("scene holds no trees");
    Vec2 mean;
    for (const auto& p : scene.placements) {
        mean.x += p.position.x;
        mean.y += p.position.y;
    }
    mean.x /= static_cast<double>(scene.placements.size());
    mean.y /= static_cast<double>(scene.placements.size());
    return mean;
}

double mean_tree_height(const Scene& scene) {
    if (scene.trees.empty()) throw ValidationError("scene holds no trees");
    double mean = 0.0;
    for (const auto& t : scene.trees) mean += t.height;
    return mean / static_cast<double>(scene.trees.size());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "foliage-scene";
    j["version"] = 1;
    j["master_seed"] = scene.inputs.master_seed;
    j["domain"] = scene.inputs.domain;
    j["lsystem"] = scene.inputs.lsystem;
    j["randomization"] = scene.inputs.randomization;

    std::filesystem::path ref = scene.inputs.reference_path;
    if (!ref.empty()) {
        const auto ref_abs = std::filesystem::weakly_canonical(std::filesystem::absolute(ref));
        const auto scene_dir =
            std::filesystem::weakly_canonical(std::filesystem::absolute(path).parent_path());
        const auto rel = std::filesystem::proximate(ref_abs, scene_dir);
        ref = rel.empty() ? ref_abs : rel;
    }
    j["reference_tree"] = ref.generic_string();

    nlohmann::json placements = nlohmann::json::array();
    for (const auto& p : scene.placements) {
        placements.push_back({{"x", p.position.x}, {"y", p.position.y}, {"yaw", p.yaw}, {"seed", p.seed}});
    }
    j["placements"] = std::move(placements);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write scene file: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing scene file: " + path.string());
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scene file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    try {
        reject_unknown_keys(j,
                            {"format", "version", "master_seed", "domain", "reference_tree", "lsystem",
                             "randomization", "placements"},
                            path.string());
        if (j.at("format").get<std::string>() != "foliage-scene") {
            throw ParseError(path.string() + ": not a scene file");
        }
        if (j.at("version").get<int>() != 1) {
            throw ParseError(path.string() + ": unsupported scene version");
        }

        SceneBuildInputs inputs;
        inputs.master_seed = j.at("master_seed").get<std::uint64_t>();
        inputs.domain = j.at("domain").get<Rect>();
        inputs.lsystem = j.at("lsystem").get<LSystemSpec>();
        inputs.randomization = j.at("randomization").get<RandomizationParams>();

        std::filesystem::path ref_path = j.at("reference_tree").get<std::string>();
        if (ref_path.is_relative()) ref_path = path.parent_path() / ref_path;
        inputs.reference_path = ref_path;

        validate(inputs.lsystem);
        const std::string expanded = expand(inputs.lsystem);
        const std::vector<BranchAttachment> attachments = interpret_trunk(expanded, inputs.lsystem.turtle);
        const ReferenceTree ref = load_reference(ref_path);

        Scene scene;
        scene.inputs = inputs;
        for (const auto& pj : j.at("placements")) {
            reject_unknown_keys(pj, {"x", "y", "yaw", "seed"}, path.string() + ": placements[]");
            TreePlacement placement;
            placement.position = {pj.at("x").get<double>(), pj.at("y").get<double>()};
            placement.yaw = pj.at("yaw").get<double>();
            placement.seed = pj.at("seed").get<std::uint64_t>();

            RandomizationParams params = inputs.randomization;
            params.seed = placement.seed;
            scene.trees.push_back(place_tree(randomize_tree(ref, attachments, params), placement.position,
                                             placement.yaw));
            scene.placements.push_back(placement);
        }
        finalize_scene(scene);
        return scene;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace foliage
