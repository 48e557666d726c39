#include <doctest.h>

#include <cmath>
#include <numbers>

#include "foliage/errors.hpp"
#include "foliage/lsystem.hpp"
#include "foliage/scene.hpp"
#include "foliage/trajectory.hpp"
#include "foliage/treegen.hpp"

using namespace foliage;

namespace {

constexpr double kPi = std::numbers::pi;

struct ForestFixture {
    ReferenceTree ref;
    std::vector<BranchAttachment> attachments;
    LSystemSpec spec;
    SceneBuildInputs inputs;

    ForestFixture() {
        ref = load_reference(FOLIAGE_DATA_DIR "/reference_tree.txt");
        spec = default_branching_spec();
        attachments = interpret_trunk(expand(spec), spec.turtle);
        inputs.master_seed = 404;
        inputs.domain = {0.0, 0.0, 20.0, 20.0};
        inputs.reference_path = FOLIAGE_DATA_DIR "/reference_tree.txt";
        inputs.lsystem = spec;
        inputs.randomization = RandomizationParams{};
    }

    Scene build(const std::vector<Vec2>& positions) const {
        return build_scene(positions, ref, attachments, inputs);
    }
};

TrajectorySpec default_circle(Vec2 center, double height) {
    CirclePath path;
    path.center = center;
    path.height = height;
    TrajectorySpec spec;
    spec.path = path;
    return spec;
}

} // namespace

TEST_CASE("circle poses sit on the ring and aim at the center") {
    const TrajectorySpec spec = default_circle({10.0, 10.0}, 1.5);
    const Scene empty;
    const auto poses = poses_from_spec(spec, empty);
    REQUIRE(poses.size() == 15);

    const auto& path = std::get<CirclePath>(spec.path);
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const double ang = static_cast<double>(i) * 24.0 * kPi / 180.0;
        const Vec3 want_pos{10.0 + path.radius * std::cos(ang), 10.0 + path.radius * std::sin(ang), 1.5};
        const Vec3 want_dir{-std::cos(ang), -std::sin(ang), 0.0};
        CHECK(distance(poses[i].position, want_pos) < 1e-12);
        CHECK(norm(poses[i].boresight - want_dir) < 1e-12);
        CHECK(poses[i].beamwidth_deg == spec.beamwidth_deg);

        // walking one radius along the boresight reaches the center
        const Vec3 reached = poses[i].position + poses[i].boresight * path.radius;
        CHECK(distance(reached, {10.0, 10.0, 1.5}) < 1e-12);
    }
}

TEST_CASE("circle defaults resolve from the scene") {
    const ForestFixture fx;
    const Scene scene = fx.build({{0.0, 0.0}, {4.0, 0.0}});

    CirclePath path; // center and height unset
    TrajectorySpec spec;
    spec.path = path;
    const auto poses = poses_from_spec(spec, scene);
    REQUIRE(poses.size() == 15);

    const double want_height = 0.5 * mean_tree_height(scene);
    CHECK(poses[0].position.x == doctest::Approx(2.0 + 6.2).epsilon(1e-12));
    CHECK(poses[0].position.y == doctest::Approx(0.0));
    CHECK(poses[0].position.z == doctest::Approx(want_height).epsilon(1e-12));

    const Scene empty;
    CHECK_THROWS_AS(poses_from_spec(spec, empty), ValidationError);
}

TEST_CASE("line poses interpolate and aim along travel") {
    LinePath path;
    path.start = {0.0, 0.0, 1.0};
    path.end = {10.0, 0.0, 1.0};
    path.points = 5;
    TrajectorySpec spec;
    spec.path = path;
    spec.beamwidth_deg = 35.0;

    const Scene empty;
    const auto poses = poses_from_spec(spec, empty);
    REQUIRE(poses.size() == 5);
    for (std::size_t i = 0; i < poses.size(); ++i) {
        CHECK(poses[i].position.x == doctest::Approx(2.5 * static_cast<double>(i)).epsilon(1e-12));
        CHECK(norm(poses[i].boresight - Vec3{1.0, 0.0, 0.0}) < 1e-12);
        CHECK(poses[i].beamwidth_deg == 35.0);
    }

    path.points = 1;
    spec.path = path;
    const auto single = poses_from_spec(spec, empty);
    REQUIRE(single.size() == 1);
    CHECK(distance(single[0].position, path.start) < 1e-12);
}

TEST_CASE("trajectory specs are validated") {
    TrajectorySpec spec;
    spec.beamwidth_deg = 0.0;
    CHECK_THROWS_AS(validate(spec), ValidationError);
    spec.beamwidth_deg = 180.0;
    CHECK_THROWS_AS(validate(spec), ValidationError);

    spec = {};
    CirclePath circle;
    circle.points = 0;
    spec.path = circle;
    CHECK_THROWS_AS(validate(spec), ValidationError);
    circle = {};
    circle.radius = 0.0;
    spec.path = circle;
    CHECK_THROWS_AS(validate(spec), ValidationError);

    spec = {};
    LinePath line;
    line.start = line.end = {1.0, 2.0, 3.0};
    spec.path = line;
    CHECK_THROWS_AS(validate(spec), ValidationError);
}

TEST_CASE("trajectory runs report every pose in order") {
    const ForestFixture fx;
    const Scene scene = fx.build({{10.0, 10.0}});
    const TrajectorySpec spec = default_circle({10.0, 10.0}, 1.0);
    const AcousticConfig cfg;
    const LeafBeampatternParams leaf;

    const RunReport report = run_trajectory(spec, scene, cfg, leaf, 0);
    REQUIRE(report.points.size() == 15);
    CHECK(report.point_count == 15);
    CHECK(report.tree_count == 1);

    const auto poses = poses_from_spec(spec, scene);
    std::size_t nonzero = 0;
    double max_point_wall = 0.0;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        CHECK(distance(report.points[i].pose.position, poses[i].position) < 1e-12);
        CHECK(report.points[i].impulse.samples.size() == cfg.n);
        CHECK(report.points[i].impulse.sample_rate == cfg.sample_rate);
        CHECK(report.points[i].facet_count ==
              facets_in_main_lobe(scene, poses[i]).size());
        if (report.points[i].facet_count > 0) ++nonzero;
        max_point_wall = std::max(max_point_wall, report.points[i].wall_s);
        CHECK(report.points[i].wall_s >= 0.0);
    }
    CHECK(nonzero > 0);
    CHECK(report.total_wall_s >= max_point_wall);
}

TEST_CASE("signals are bitwise identical across worker counts") {
    const ForestFixture fx;
    const Scene scene = fx.build({{10.0, 10.0}, {7.0, 12.0}});
    const TrajectorySpec spec = default_circle({10.0, 10.0}, 1.0);
    const AcousticConfig cfg;
    const LeafBeampatternParams leaf;

    const RunReport serial = run_trajectory(spec, scene, cfg, leaf, 1);
    const RunReport parallel = run_trajectory(spec, scene, cfg, leaf, 4);
    REQUIRE(serial.points.size() == parallel.points.size());
    for (std::size_t i = 0; i < serial.points.size(); ++i) {
        CHECK(serial.points[i].facet_count == parallel.points[i].facet_count);
        const auto& a = serial.points[i].impulse.samples;
        const auto& b = parallel.points[i].impulse.samples;
        REQUIRE(a.size() == b.size());
        bool same = true;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] != b[j]) {
                same = false;
                break;
            }
        }
        CHECK(same);
    }
}

TEST_CASE("poses that see nothing produce exact silence") {
    const ForestFixture fx;
    const Scene scene = fx.build({{10.0, 10.0}});

    LinePath path;
    path.start = {100.0, 100.0, 1.0};
    path.end = {110.0, 110.0, 1.0}; // aimed away from the only tree
    path.points = 3;
    TrajectorySpec spec;
    spec.path = path;
    spec.beamwidth_deg = 50.0;

    const RunReport report = run_trajectory(spec, scene, AcousticConfig{}, LeafBeampatternParams{}, 0);
    for (const auto& point : report.points) {
        CHECK(point.facet_count == 0);
        for (double s : point.impulse.samples) CHECK(s == 0.0);
    }
}

TEST_CASE("timing sweeps cover the requested grid") {
    const ForestFixture fx;
    AcousticConfig cfg;
    cfg.n = 4096; // keep the sweep cheap
    cfg.f_lo = 60000.0;
    cfg.f_hi = 80000.0;
    const LeafBeampatternParams leaf;

    CirclePath circle;
    circle.radius = 6.2;
    TrajectorySpec base;
    base.path = circle;
    base.beamwidth_deg = 50.0;

    const std::vector<int> point_counts{1, 4};
    const std::vector<int> tree_counts{1, 3};
    const TimingTable table =
        timing_sweep(point_counts, tree_counts, base, cfg, leaf, fx.ref, fx.attachments, fx.inputs, 3, 0);

    CHECK(table.point_counts == point_counts);
    CHECK(table.tree_counts == tree_counts);
    REQUIRE(table.median_s.size() == 2);
    for (const auto& row : table.median_s) {
        REQUIRE(row.size() == 2);
        for (double v : row) CHECK(v >= 0.0);
    }

    CHECK_THROWS_AS(timing_sweep({}, tree_counts, base, cfg, leaf, fx.ref, fx.attachments, fx.inputs, 3, 0),
                    ValidationError);
    CHECK_THROWS_AS(timing_sweep(point_counts, {0}, base, cfg, leaf, fx.ref, fx.attachments, fx.inputs, 3, 0),
                    ValidationError);
    CHECK_THROWS_AS(timing_sweep(point_counts, tree_counts, base, cfg, leaf, fx.ref, fx.attachments,
                                 fx.inputs, 0, 0),
                    ValidationError);
}
