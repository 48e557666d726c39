#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "foliage/acoustics.hpp"
#include "foliage/trajectory.hpp"

namespace foliage {

/// CSV with header time_s,amplitude; %.17g so reruns are byte-identical.
void write_impulse_csv(const ImpulseResponse& impulse, const std::filesystem::path& path);

ImpulseResponse read_impulse_csv(const std::filesystem::path& path);

/// Peak-normalized 16-bit mono PCM plus a <name>.json sidecar recording the
/// normalization factor, peak amplitude, and sample rate.
void write_impulse_wav(const ImpulseResponse& impulse, const std::filesystem::path& path);

struct RunExport {
    std::size_t pose_count = 0;
    std::filesystem::path directory;
};

/// Writes impulse_NNN.csv / impulse_NNN.wav per pose, manifest.json
/// (config echo, seed, facet counts, timings) and timings.csv.
RunExport export_run(const RunReport& report, const nlohmann::json& manifest_config,
                     std::uint64_t seed, const std::filesystem::path& dir);

/// Reads impulse_NNN.csv files from a run directory and writes one
/// plot_NNN.json per pose with the series plus peak annotations.
std::size_t write_plot_data(const std::filesystem::path& run_dir);

void write_timing_csv(const TimingTable& table, const std::filesystem::path& path);

/// Regular-grid intensity samples with bilinear interpolation, edge-clamped.
struct IntensityGrid {
    std::vector<double> xs; ///< strictly increasing
    std::vector<double> ys;
    std::vector<double> values; ///< row-major, values[iy * xs.size() + ix]

    double sample(double x, double y) const;
};

/// CSV with header x,y,lambda covering a complete regular grid.
IntensityGrid load_intensity_csv(const std::filesystem::path& path);

} // namespace foliage
