#include "foliage/config.hpp"

#include <fstream>

#include "foliage/errors.hpp"
#include "foliage/serialize.hpp"

namespace foliage {

namespace {

Vec2 vec2_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ParseError(where + ": expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

IppSettings parse_ipp(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    reject_unknown_keys(j, {"domain", "lambda_max", "intensity", "intensity_csv"}, "ipp");
    IppSettings ipp;
    if (j.contains("domain")) ipp.domain = j.at("domain").get<Rect>();
    if (j.contains("lambda_max")) ipp.lambda_max = j.at("lambda_max").get<double>();
    if (j.contains("intensity") && j.contains("intensity_csv")) {
        throw ValidationError("ipp: give either intensity or intensity_csv, not both");
    }
    if (j.contains("intensity")) ipp.constant = j.at("intensity").get<double>();
    if (j.contains("intensity_csv")) {
        std::filesystem::path p = j.at("intensity_csv").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        ipp.csv_path = p;
        ipp.grid = std::make_shared<IntensityGrid>(load_intensity_csv(p));
    }
    return ipp;
}

AcousticConfig parse_acoustic(const nlohmann::json& j, LeafBeampatternParams& leaf) {
    reject_unknown_keys(j,
                        {"band_hz", "speed_of_sound", "sample_rate_hz", "signal_length", "amplitude",
                         "leaf_amplitude", "leaf_width", "leaf_gain_table"},
                        "acoustic");
    AcousticConfig cfg;
    if (j.contains("band_hz")) {
        const auto& band = j.at("band_hz");
        if (!band.is_array() || band.size() != 2) throw ParseError("acoustic.band_hz: expected [f_lo, f_hi]");
        cfg.f_lo = band[0].get<double>();
        cfg.f_hi = band[1].get<double>();
    }
    if (j.contains("speed_of_sound")) cfg.speed_of_sound = j.at("speed_of_sound").get<double>();
    if (j.contains("sample_rate_hz")) cfg.sample_rate = j.at("sample_rate_hz").get<double>();
    if (j.contains("signal_length")) cfg.n = j.at("signal_length").get<std::size_t>();
    if (j.contains("amplitude")) cfg.amplitude = j.at("amplitude").get<double>();
    if (j.contains("leaf_amplitude")) leaf.amplitude = j.at("leaf_amplitude").get<double>();
    if (j.contains("leaf_width")) leaf.width = j.at("leaf_width").get<double>();
    if (j.contains("leaf_gain_table")) {
        for (const auto& row : j.at("leaf_gain_table")) {
            if (!row.is_array() || row.size() != 3) {
                throw ParseError("acoustic.leaf_gain_table: expected rows [ka, A, B]");
            }
            leaf.gain_table.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
    }
    return cfg;
}

TrajectorySpec parse_trajectory(const nlohmann::json& j) {
    TrajectorySpec spec;
    const std::string kind = j.value("kind", std::string("circle"));
    if (kind == "circle") {
        reject_unknown_keys(j, {"kind", "center", "radius", "height", "points", "interval_deg", "beamwidth_deg"},
                            "trajectory");
        CirclePath circle;
        if (j.contains("center")) circle.center = vec2_from_json(j.at("center"), "trajectory.center");
        if (j.contains("radius")) circle.radius = j.at("radius").get<double>();
        if (j.contains("height")) circle.height = j.at("height").get<double>();
        if (j.contains("points")) circle.points = j.at("points").get<int>();
        if (j.contains("interval_deg")) circle.interval_deg = j.at("interval_deg").get<double>();
        spec.path = circle;
    } else if (kind == "line") {
        reject_unknown_keys(j, {"kind", "start", "end", "points", "beamwidth_deg"}, "trajectory");
        LinePath line;
        line.start = vec3_from_json(j.at("start"), "trajectory.start");
        line.end = vec3_from_json(j.at("end"), "trajectory.end");
        if (j.contains("points")) line.points = j.at("points").get<int>();
        spec.path = line;
    } else {
        throw ValidationError("trajectory.kind: expected 'circle' or 'line', got '" + kind + "'");
    }
    if (j.contains("beamwidth_deg")) spec.beamwidth_deg = j.at("beamwidth_deg").get<double>();
    return spec;
}

TimingConfig parse_timing(const nlohmann::json& j) {
    reject_unknown_keys(j, {"point_counts", "tree_counts", "repetitions"}, "timing");
    TimingConfig timing;
    if (j.contains("point_counts")) timing.point_counts = j.at("point_counts").get<std::vector<int>>();
    if (j.contains("tree_counts")) timing.tree_counts = j.at("tree_counts").get<std::vector<int>>();
    if (j.contains("repetitions")) timing.repetitions = j.at("repetitions").get<int>();
    return timing;
}

} // namespace

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    const std::filesystem::path base_dir = path.parent_path();
    RunConfig cfg;
    cfg.raw = j;
    cfg.source = path;
    cfg.lsystem = default_branching_spec();

    try {
        reject_unknown_keys(j,
                            {"seed", "output_dir", "reference_tree", "lsystem", "randomization", "ipp",
                             "acoustic", "trajectory", "timing"},
                            path.string());

        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) {
            std::filesystem::path out = j.at("output_dir").get<std::string>();
            if (out.is_relative()) out = base_dir / out;
            cfg.output_dir = out;
        }
        if (!j.contains("reference_tree")) {
            throw ValidationError(path.string() + ": missing required key 'reference_tree'");
        }
        std::filesystem::path ref = j.at("reference_tree").get<std::string>();
        if (ref.is_relative()) ref = base_dir / ref;
        if (!std::filesystem::exists(ref)) {
            throw ValidationError("reference_tree: file does not exist: " + ref.string());
        }
        cfg.reference_tree = ref;

        if (j.contains("lsystem")) cfg.lsystem = j.at("lsystem").get<LSystemSpec>();
        if (j.contains("randomization")) cfg.randomization = j.at("randomization").get<RandomizationParams>();
        if (j.contains("ipp")) cfg.ipp = parse_ipp(j.at("ipp"), base_dir);
        if (j.contains("acoustic")) {
            cfg.acoustic = parse_acoustic(j.at("acoustic"), cfg.leaf);
        }
        if (j.contains("trajectory")) cfg.trajectory = parse_trajectory(j.at("trajectory"));
        if (j.contains("timing")) cfg.timing = parse_timing(j.at("timing"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    validate(cfg.lsystem);
    validate(cfg.randomization);
    validate(cfg.acoustic);
    validate(cfg.leaf);
    validate(cfg.trajectory);
    if (!(cfg.ipp.lambda_max > 0.0)) throw ValidationError("ipp.lambda_max must be > 0");
    if (!(cfg.ipp.domain.width() > 0.0) || !(cfg.ipp.domain.height() > 0.0)) {
        throw ValidationError("ipp.domain is degenerate");
    }
    if (cfg.timing.repetitions < 1) throw ValidationError("timing.repetitions must be >= 1");
    return cfg;
}

IppConfig make_ipp_config(const RunConfig& cfg) {
    IppConfig ipp;
    ipp.domain = cfg.ipp.domain;
    ipp.lambda_max = cfg.ipp.lambda_max;
    ipp.seed = cfg.seed;
    if (cfg.ipp.grid) {
        const std::shared_ptr<IntensityGrid> grid = cfg.ipp.grid;
        ipp.intensity = [grid](double x, double y) { return grid->sample(x, y); };
    } else {
        const double value = cfg.ipp.constant.value_or(cfg.ipp.lambda_max);
        ipp.intensity = [value](double, double) { return value; };
    }
    return ipp;
}

} // namespace foliage
