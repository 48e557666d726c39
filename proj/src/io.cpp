#include "foliage/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "foliage/errors.hpp"

namespace foliage {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_write(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f) throw IoError("cannot write file: " + path.string());
    return f;
}

} // namespace

void write_impulse_csv(const ImpulseResponse& impulse, const std::filesystem::path& path) {
    if (!(impulse.sample_rate > 0.0)) throw ValidationError("impulse export: sample rate must be > 0");
    FilePtr f = open_for_write(path);
    std::fprintf(f.get(), "time_s,amplitude\n");
    for (std::size_t j = 0; j < impulse.samples.size(); ++j) {
        const double t = static_cast<double>(j) / impulse.sample_rate;
        std::fprintf(f.get(), "%.17g,%.17g\n", t, impulse.samples[j]);
    }
}

namespace {

void read_impulse_columns(const std::filesystem::path& path, std::vector<double>& times,
                          std::vector<double>& amps) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open impulse file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "time_s,amplitude") {
        throw ParseError(path.string() + ":1: expected header 'time_s,amplitude'");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
        }
        try {
            times.push_back(std::stod(line.substr(0, comma)));
            amps.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number");
        }
    }
}

} // namespace

ImpulseResponse read_impulse_csv(const std::filesystem::path& path) {
    std::vector<double> times, amps;
    read_impulse_columns(path, times, amps);
    ImpulseResponse impulse;
    impulse.samples = std::move(amps);
    impulse.sample_rate = times.size() >= 2 && times[1] > 0.0 ? 1.0 / times[1] : 0.0;
    return impulse;
}

void write_impulse_wav(const ImpulseResponse& impulse, const std::filesystem::path& path) {
    if (!(impulse.sample_rate > 0.0)) throw ValidationError("impulse export: sample rate must be > 0");
    double peak = 0.0;
    for (double s : impulse.samples) peak = std::max(peak, std::abs(s));
    const double factor = peak > 0.0 ? 32767.0 / peak : 0.0;

    std::vector<std::int16_t> pcm(impulse.samples.size());
    for (std::size_t i = 0; i < impulse.samples.size(); ++i) {
        const double scaled = impulse.samples[i] * factor;
        pcm[i] = static_cast<std::int16_t>(std::clamp(std::lround(scaled), -32768L, 32767L));
    }

    const std::uint32_t data_size = static_cast<std::uint32_t>(pcm.size() * sizeof(std::int16_t));
    const std::uint32_t sample_rate = static_cast<std::uint32_t>(std::lround(impulse.sample_rate));
    const std::uint32_t byte_rate = sample_rate * 2;
    const std::uint16_t block_align = 2;
    const std::uint16_t bits = 16;
    const std::uint16_t channels = 1;
    const std::uint16_t pcm_format = 1;
    const std::uint32_t fmt_size = 16;
    const std::uint32_t riff_size = 36 + data_size;

    FilePtr f = open_for_write(path);
    auto put = [&](const void* p, std::size_t bytes) { std::fwrite(p, 1, bytes, f.get()); };
    put("RIFF", 4);
    put(&riff_size, 4);
    put("WAVE", 4);
    put("fmt ", 4);
    put(&fmt_size, 4);
    put(&pcm_format, 2);
    put(&channels, 2);
    put(&sample_rate, 4);
    put(&byte_rate, 4);
    put(&block_align, 2);
    put(&bits, 2);
    put("data", 4);
    put(&data_size, 4);
    if (!pcm.empty()) put(pcm.data(), data_size);
    f.reset();

    nlohmann::json sidecar = {{"normalization_factor", factor},
                              {"peak_amplitude", peak},
                              {"sample_rate_hz", impulse.sample_rate},
                              {"samples", impulse.samples.size()}};
    std::ofstream side(path.string() + ".json");
    if (!side) throw IoError("cannot write wav sidecar for: " + path.string());
    side << sidecar.dump(2) << "\n";
}

namespace {

std::string pose_stem(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu", index);
    return buf;
}

} // namespace

RunExport export_run(const RunReport& report, const nlohmann::json& manifest_config,
                     std::uint64_t seed, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    nlohmann::json points = nlohmann::json::array();
    std::size_t total_facets = 0;

    FilePtr timings = open_for_write(dir / "timings.csv");
    std::fprintf(timings.get(), "pose,facet_count,wall_s\n");

    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const RunPoint& point = report.points[i];
        const std::string stem = pose_stem(i);
        const std::string csv_name = "impulse_" + stem + ".csv";
        const std::string wav_name = "impulse_" + stem + ".wav";
        write_impulse_csv(point.impulse, dir / csv_name);
        write_impulse_wav(point.impulse, dir / wav_name);

        std::fprintf(timings.get(), "%zu,%zu,%.9g\n", i, point.facet_count, point.wall_s);
        total_facets += point.facet_count;

        points.push_back({{"index", i},
                          {"position", {point.pose.position.x, point.pose.position.y, point.pose.position.z}},
                          {"boresight", {point.pose.boresight.x, point.pose.boresight.y, point.pose.boresight.z}},
                          {"beamwidth_deg", point.pose.beamwidth_deg},
                          {"facet_count", point.facet_count},
                          {"wall_s", point.wall_s},
                          {"impulse_csv", csv_name},
                          {"impulse_wav", wav_name}});
    }
    std::fprintf(timings.get(), "total,%zu,%.9g\n", total_facets, report.total_wall_s);
    timings.reset();

    nlohmann::json manifest = {{"format", "foliage-run"},
                               {"version", 1},
                               {"seed", seed},
                               {"config", manifest_config},
                               {"tree_count", report.tree_count},
                               {"point_count", report.point_count},
                               {"total_wall_s", report.total_wall_s},
                               {"points", std::move(points)}};
    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw IoError("cannot write manifest in: " + dir.string());
    mf << manifest.dump(2) << "\n";

    return RunExport{report.points.size(), dir};
}

std::size_t write_plot_data(const std::filesystem::path& run_dir) {
    if (!std::filesystem::is_directory(run_dir)) {
        throw IoError("run directory does not exist: " + run_dir.string());
    }
    std::vector<std::filesystem::path> csvs;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("impulse_", 0) == 0 && entry.path().extension() == ".csv") {
            csvs.push_back(entry.path());
        }
    }
    std::sort(csvs.begin(), csvs.end());

    for (const auto& csv : csvs) {
        std::vector<double> times, amps;
        read_impulse_columns(csv, times, amps);

        std::size_t peak_index = 0;
        double peak_abs = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (std::abs(amps[i]) > peak_abs) {
                peak_abs = std::abs(amps[i]);
                peak_index = i;
            }
        }
        const bool all_zero = peak_abs == 0.0;

        nlohmann::json plot = {{"source_csv", csv.filename().string()},
                               {"peak_index", peak_index},
                               {"peak_time_s", times.empty() ? 0.0 : times[peak_index]},
                               {"peak_amplitude", amps.empty() ? 0.0 : amps[peak_index]},
                               {"all_zero", all_zero},
                               {"time_s", times},
                               {"amplitude", amps}};

        const std::string stem = csv.stem().string(); // impulse_NNN
        const std::string plot_name = "plot_" + stem.substr(std::strlen("impulse_")) + ".json";
        std::ofstream out(run_dir / plot_name);
        if (!out) throw IoError("cannot write plot data: " + (run_dir / plot_name).string());
        out << plot.dump() << "\n";
    }
    return csvs.size();
}

void write_timing_csv(const TimingTable& table, const std::filesystem::path& path) {
    FilePtr f = open_for_write(path);
    std::fprintf(f.get(), "points");
    for (int t : table.tree_counts) std::fprintf(f.get(), ",trees_%d", t);
    std::fprintf(f.get(), "\n");
    for (std::size_t pi = 0; pi < table.point_counts.size(); ++pi) {
        std::fprintf(f.get(), "%d", table.point_counts[pi]);
        for (std::size_t ti = 0; ti < table.tree_counts.size(); ++ti) {
            std::fprintf(f.get(), ",%.9g", table.median_s[pi][ti]);
        }
        std::fprintf(f.get(), "\n");
    }
}

double IntensityGrid::sample(double x, double y) const {
    auto locate = [](const std::vector<double>& axis, double v, std::size_t& lo, double& t) {
        if (axis.size() == 1 || v <= axis.front()) {
            lo = 0;
            t = 0.0;
            return;
        }
        if (v >= axis.back()) {
            lo = axis.size() - 2;
            t = 1.0;
            return;
        }
        lo = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin()) - 1;
        t = (v - axis[lo]) / (axis[lo + 1] - axis[lo]);
    };
    std::size_t ix = 0, iy = 0;
    double tx = 0.0, ty = 0.0;
    locate(xs, x, ix, tx);
    locate(ys, y, iy, ty);
    const std::size_t nx = xs.size();
    const std::size_t ix1 = std::min(ix + 1, nx - 1);
    const std::size_t iy1 = std::min(iy + 1, ys.size() - 1);
    const double v00 = values[iy * nx + ix];
    const double v10 = values[iy * nx + ix1];
    const double v01 = values[iy1 * nx + ix];
    const double v11 = values[iy1 * nx + ix1];
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
}

IntensityGrid load_intensity_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open intensity file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "x,y,lambda") {
        throw ParseError(path.string() + ":1: expected header 'x,y,lambda'");
    }
    std::map<double, std::map<double, double>> rows; // y -> x -> lambda
    int line_no = 1;
    std::size_t n_samples = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double x = 0.0, y = 0.0, v = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &v) != 3) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected x,y,lambda");
        }
        if (rows[y].count(x)) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": duplicate grid point");
        }
        rows[y][x] = v;
        ++n_samples;
    }
    if (rows.empty()) throw ParseError(path.string() + ": no intensity samples");

    IntensityGrid grid;
    for (const auto& [y, row] : rows) grid.ys.push_back(y);
    for (const auto& [x, v] : rows.begin()->second) {
        (void)v;
        grid.xs.push_back(x);
    }
    if (n_samples != grid.xs.size() * grid.ys.size()) {
        throw ValidationError(path.string() + ": intensity samples do not form a complete grid");
    }
    grid.values.reserve(n_samples);
    for (const auto& [y, row] : rows) {
        (void)y;
        if (row.size() != grid.xs.size()) {
            throw ValidationError(path.string() + ": intensity samples do not form a complete grid");
        }
        std::size_t ix = 0;
        for (const auto& [x, v] : row) {
            if (x != grid.xs[ix]) {
                throw ValidationError(path.string() + ": intensity samples do not form a complete grid");
            }
            grid.values.push_back(v);
            ++ix;
        }
    }
    return grid;
}

} // namespace foliage
