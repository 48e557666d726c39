// Acceptance gate: one self-checking criterion per number, each printing a
// single PASS/FAIL line. Run with no argument for all criteria or with a
// number (1..12) for one. Exit status 0 only when every run criterion passes.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "foliage/acoustics.hpp"
#include "foliage/config.hpp"
#include "foliage/errors.hpp"
#include "foliage/lsystem.hpp"
#include "foliage/rng.hpp"
#include "foliage/scene.hpp"
#include "foliage/trajectory.hpp"
#include "foliage/treegen.hpp"

using namespace foliage;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

struct Forest {
    ReferenceTree ref;
    std::vector<BranchAttachment> attachments;
    LSystemSpec spec;

    Forest() {
        ref = load_reference(FOLIAGE_DATA_DIR "/reference_tree.txt");
        spec = default_branching_spec();
        attachments = interpret_trunk(expand(spec), spec.turtle);
    }

    SceneBuildInputs inputs(std::uint64_t master_seed) const {
        SceneBuildInputs in;
        in.master_seed = master_seed;
        in.domain = {0.0, 0.0, 20.0, 20.0};
        in.reference_path = FOLIAGE_DATA_DIR "/reference_tree.txt";
        in.lsystem = spec;
        in.randomization = RandomizationParams{};
        return in;
    }

    Scene build(const std::vector<Vec2>& positions, std::uint64_t master_seed) const {
        return build_scene(positions, ref, attachments, inputs(master_seed));
    }
};

FacetObservation on_axis_facet(double r, double radius = 0.02) {
    FacetObservation obs;
    obs.r = r;
    obs.radius = radius;
    return obs;
}

std::size_t band_lo_bin(const AcousticConfig& cfg) {
    return static_cast<std::size_t>(std::ceil(cfg.f_lo * cfg.n / cfg.sample_rate));
}

std::size_t band_hi_bin(const AcousticConfig& cfg) {
    return static_cast<std::size_t>(std::floor(cfg.f_hi * cfg.n / cfg.sample_rate));
}

/// Envelope magnitude at sample j from the positive-frequency bins, summed
/// directly; independent of the FFT backend under test.
double envelope_at(const Spectrum& spec, std::size_t n, std::size_t j, std::size_t k_lo, std::size_t k_hi) {
    std::complex<double> z{0.0, 0.0};
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const double ang = 2.0 * kPi * static_cast<double>(k) * static_cast<double>(j) / static_cast<double>(n);
        z += spec.bins[k] * std::polar(1.0, ang);
    }
    return std::abs(z);
}

std::size_t envelope_argmax(const Spectrum& spec, std::size_t n, std::size_t k_lo, std::size_t k_hi) {
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t j = 0; j < n; j += 8) {
        const double e = envelope_at(spec, n, j, k_lo, k_hi);
        if (e > best_val) {
            best_val = e;
            best = j;
        }
    }
    const std::size_t lo = best >= 16 ? best - 16 : 0;
    const std::size_t hi = std::min(n, best + 16);
    for (std::size_t j = lo; j < hi; ++j) {
        const double e = envelope_at(spec, n, j, k_lo, k_hi);
        if (e > best_val) {
            best_val = e;
            best = j;
        }
    }
    return best;
}

// 1: poses whose main lobe contains no facet synthesize an identically zero signal.
bool criterion_silence(std::string& detail) {
    const auto start = Clock::now();
    const Forest forest;
    const Scene scene = forest.build({{10.0, 10.0}}, 21);

    LinePath path;
    path.start = {100.0, 100.0, 1.0};
    path.end = {110.0, 110.0, 1.0}; // flying away from the only tree
    path.points = 5;
    TrajectorySpec spec;
    spec.path = path;
    spec.beamwidth_deg = 50.0;

    const RunReport report = run_trajectory(spec, scene, AcousticConfig{}, LeafBeampatternParams{}, 0);
    std::size_t nonzero_samples = 0;
    std::size_t facets = 0;
    for (const auto& point : report.points) {
        facets += point.facet_count;
        for (double s : point.impulse.samples) {
            if (s != 0.0) ++nonzero_samples;
        }
    }
    const double elapsed = seconds_since(start);
    detail = format("%zu facets, %zu nonzero samples over %zu poses, %.2f s (limit 5)",
                    facets, nonzero_samples, report.points.size(), elapsed);
    return facets == 0 && nonzero_samples == 0 && elapsed < 5.0;
}

// 2: a single facet's envelope peaks at the round-trip delay sample, within one sample.
bool criterion_delay(std::string& detail) {
    const auto start = Clock::now();
    const AcousticConfig cfg;
    const auto sonar = SonarBeampatternParams::from_beamwidth(20.0 * kPi / 180.0, 1.0);
    const LeafBeampatternParams leaf;
    const std::size_t k_lo = band_lo_bin(cfg);
    const std::size_t k_hi = band_hi_bin(cfg);

    long long worst = 0;
    for (double r : {0.5, 1.0, 2.0, 4.0, 6.0}) {
        const Spectrum spec = assemble_spectrum({on_axis_facet(r)}, cfg, sonar, leaf);
        const long long got = static_cast<long long>(envelope_argmax(spec, cfg.n, k_lo, k_hi));
        const long long want = std::llround(2.0 * r * cfg.sample_rate / cfg.speed_of_sound);
        worst = std::max(worst, std::llabs(got - want));
    }
    const double elapsed = seconds_since(start);
    detail = format("worst peak offset %lld samples (limit 1), %.2f s (limit 5)", worst, elapsed);
    return worst <= 1 && elapsed < 5.0;
}

// 3: echo amplitude follows 1/r^2: doubling the range divides it by four, to 1e-12.
bool criterion_spreading(std::string& detail) {
    const AcousticConfig cfg;
    const auto sonar = SonarBeampatternParams::from_beamwidth(20.0 * kPi / 180.0, 1.0);
    const LeafBeampatternParams leaf;
    const double f = 70000.0;

    double worst = 0.0;
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
        const double a1 = facet_amplitude(on_axis_facet(r), f, cfg, sonar, leaf);
        const double a2 = facet_amplitude(on_axis_facet(2.0 * r), f, cfg, sonar, leaf);
        worst = std::max(worst, std::abs(a2 * 4.0 - a1) / a1);

        const double ka = 2.0 * kPi * 0.02 * f / cfg.speed_of_sound;
        const double closed_form = ka * (cfg.speed_of_sound / f) / (2.0 * kPi * r * r);
        worst = std::max(worst, std::abs(a1 - closed_form) / closed_form);
    }
    detail = format("worst relative error %.3g (limit 1e-12)", worst);
    return worst <= 1e-12;
}

// 4: the spectrum occupies exactly the band and its conjugate mirror, nothing else.
bool criterion_band(std::string& detail) {
    const AcousticConfig cfg;
    const auto sonar = SonarBeampatternParams::from_beamwidth(20.0 * kPi / 180.0, 1.0);
    const LeafBeampatternParams leaf;
    const Spectrum spec = assemble_spectrum({on_axis_facet(1.5)}, cfg, sonar, leaf);

    const std::size_t k_lo = band_lo_bin(cfg);
    const std::size_t k_hi = band_hi_bin(cfg);

    std::size_t occupied = 0;
    std::size_t stray = 0;
    std::size_t mirror_breaks = 0;
    for (std::size_t k = 0; k < cfg.n; ++k) {
        const bool in_band = k >= k_lo && k <= k_hi;
        const bool in_mirror = k >= cfg.n - k_hi && k <= cfg.n - k_lo;
        if (in_band || in_mirror) {
            if (std::abs(spec.bins[k]) > 0.0) ++occupied;
        } else if (std::abs(spec.bins[k]) != 0.0) {
            ++stray;
        }
    }
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        if (spec.bins[cfg.n - k] != std::conj(spec.bins[k])) ++mirror_breaks;
    }

    // the synthesis path accepts the spectrum and returns a finite real signal
    const ImpulseResponse ir = synthesize_impulse(spec, cfg);
    bool finite = ir.samples.size() == cfg.n;
    double peak = 0.0;
    for (double s : ir.samples) {
        if (!std::isfinite(s)) finite = false;
        peak = std::max(peak, std::abs(s));
    }

    detail = format("%zu occupied bins (expect %zu), %zu stray, %zu mirror breaks, peak %.3g",
                    occupied, 2 * (k_hi - k_lo + 1), stray, mirror_breaks, peak);
    return occupied == 2 * (k_hi - k_lo + 1) && stray == 0 && mirror_breaks == 0 && finite && peak > 0.0;
}

// 5: spectra and impulses superpose linearly over facets.
bool criterion_superposition(std::string& detail) {
    const AcousticConfig cfg;
    const auto sonar = SonarBeampatternParams::from_beamwidth(20.0 * kPi / 180.0, 1.0);
    const LeafBeampatternParams leaf;

    // betas sit inside the facet lobe's first null so both echoes are nonzero
    FacetObservation f1 = on_axis_facet(1.0);
    f1.az = 0.02;
    f1.beta = 0.02;
    FacetObservation f2 = on_axis_facet(2.5, 0.035);
    f2.az = -0.05;
    f2.el = 0.03;
    f2.beta = 0.015;
    f2.disk = 1;

    const Spectrum s1 = assemble_spectrum({f1}, cfg, sonar, leaf);
    const Spectrum s2 = assemble_spectrum({f2}, cfg, sonar, leaf);
    const Spectrum s12 = assemble_spectrum({f1, f2}, cfg, sonar, leaf);

    double worst_bin = 0.0;
    Spectrum sum;
    sum.bins.resize(cfg.n);
    for (std::size_t k = 0; k < cfg.n; ++k) {
        sum.bins[k] = s1.bins[k] + s2.bins[k];
        worst_bin = std::max(worst_bin, std::abs(s12.bins[k] - sum.bins[k]) / (1.0 + std::abs(s12.bins[k])));
    }

    const ImpulseResponse i1 = synthesize_impulse(s1, cfg);
    const ImpulseResponse i2 = synthesize_impulse(s2, cfg);
    const ImpulseResponse i12 = synthesize_impulse(s12, cfg);
    double peak = 0.0;
    for (double s : i12.samples) peak = std::max(peak, std::abs(s));
    double worst_sample = 0.0;
    for (std::size_t j = 0; j < cfg.n; ++j) {
        worst_sample = std::max(worst_sample, std::abs(i12.samples[j] - (i1.samples[j] + i2.samples[j])));
    }
    detail = format("worst bin error %.3g (limit 1e-12), worst sample error %.3g of peak (limit 1e-9)",
                    worst_bin, peak > 0.0 ? worst_sample / peak : 0.0);
    return worst_bin <= 1e-12 && peak > 0.0 && worst_sample <= 1e-9 * peak;
}

// 6: the emitter lobe drops to exactly half its peak at half the beamwidth.
bool criterion_half_gain(std::string& detail) {
    double worst = 0.0;
    for (double bw_deg : {10.0, 20.0, 50.0}) {
        const double bw = bw_deg * kPi / 180.0;
        const auto p = SonarBeampatternParams::from_beamwidth(bw, 1.0);
        worst = std::max(worst, std::abs(sonar_beampattern(p, bw / 2.0, 0.0) - 0.5));
        worst = std::max(worst, std::abs(sonar_beampattern(p, 0.0, bw / 2.0) - 0.5));
        worst = std::max(worst, std::abs(sonar_beampattern(p, -bw / 2.0, 0.0) - 0.5));
        worst = std::max(worst, std::abs(sonar_beampattern(p, 0.0, 0.0) - 1.0));
    }
    detail = format("worst gain error %.3g (limit 1e-9)", worst);
    return worst <= 1e-9;
}

// 7: sampled point counts hit the configured intensity, and an intensity equal
// to the bound keeps every candidate.
bool criterion_point_process(std::string& detail) {
    const auto start = Clock::now();

    // thinning at keep probability 1/2, expected count 0.05 * 400 = 20
    IppConfig cfg;
    cfg.domain = {0.0, 0.0, 20.0, 20.0};
    cfg.lambda_max = 0.1;
    cfg.intensity = [](double, double) { return 0.05; };

    const int n_seeds = 10000;
    double total = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        total += static_cast<double>(sample_ipp(cfg).size());
    }
    const double mean = total / n_seeds;
    const double tol = 3.0 * std::sqrt(20.0) / 100.0; // 3 sigma of the mean over 10^4 runs

    // intensity == bound: the kept count must equal the candidate count
    std::size_t keep_all_breaks = 0;
    IppConfig full;
    full.domain = cfg.domain;
    full.lambda_max = 0.05;
    full.intensity = [](double, double) { return 0.05; };
    for (int seed = 0; seed < 100; ++seed) {
        full.seed = static_cast<std::uint64_t>(seed);
        const std::size_t kept = sample_ipp(full).size();
        Rng replay(derive_seed(full.seed, SeedStream::Ipp, 0));
        if (kept != replay.poisson(full.lambda_max * full.domain.area())) ++keep_all_breaks;
    }

    const double elapsed = seconds_since(start);
    detail = format("mean %.4f vs 20 (tol %.4f), %zu keep-all breaks, %.1f s (limit 60)",
                    mean, tol, keep_all_breaks, elapsed);
    return std::abs(mean - 20.0) < tol && keep_all_breaks == 0 && elapsed < 60.0;
}

// 8: the indexed cone query returns exactly the linear scan's results on
// a thousand scene/pose pairs.
bool criterion_query_equivalence(std::string& detail) {
    const Forest forest;
    std::size_t pairs = 0;
    std::size_t mismatches = 0;

    for (std::uint64_t master = 0; master < 25; ++master) {
        Rng rng(derive_seed(master, SeedStream::SweepScene, 99));
        std::vector<Vec2> positions;
        const std::size_t n_trees = 1 + static_cast<std::size_t>(master % 4);
        for (std::size_t i = 0; i < n_trees; ++i) {
            positions.push_back({rng.uniform(2.0, 18.0), rng.uniform(2.0, 18.0)});
        }
        const Scene scene = forest.build(positions, master);

        for (int k = 0; k < 40; ++k) {
            SonarPose pose;
            pose.position = {rng.uniform(0.0, 20.0), rng.uniform(0.0, 20.0), rng.uniform(0.0, 3.0)};
            pose.boresight = rng.unit_sphere();
            pose.beamwidth_deg = rng.uniform(5.0, 120.0);

            const auto fast = facets_in_main_lobe(scene, pose);
            const auto slow = facets_in_main_lobe_scan(scene, pose);
            ++pairs;
            if (fast.size() != slow.size()) {
                ++mismatches;
                continue;
            }
            for (std::size_t i = 0; i < fast.size(); ++i) {
                if (fast[i].r != slow[i].r || fast[i].az != slow[i].az || fast[i].el != slow[i].el ||
                    fast[i].beta != slow[i].beta || fast[i].radius != slow[i].radius ||
                    fast[i].disk != slow[i].disk) {
                    ++mismatches;
                    break;
                }
            }
        }
    }
    detail = format("%zu scene/pose pairs, %zu mismatches", pairs, mismatches);
    return pairs == 1000 && mismatches == 0;
}

// 9: a 15-pose orbit around one tree yields echoes at some poses, quickly.
bool criterion_orbit(std::string& detail) {
    const auto start = Clock::now();
    const Forest forest;
    const Scene scene = forest.build({{10.0, 10.0}}, 9);

    CirclePath circle; // center and height resolve from the scene
    circle.radius = 6.2;
    circle.points = 15;
    circle.interval_deg = 24.0;
    TrajectorySpec spec;
    spec.path = circle;
    spec.beamwidth_deg = 20.0;

    const RunReport report = run_trajectory(spec, scene, AcousticConfig{}, LeafBeampatternParams{}, 0);
    std::size_t poses_with_facets = 0;
    std::size_t poses_with_signal = 0;
    for (const auto& point : report.points) {
        if (point.facet_count > 0) ++poses_with_facets;
        for (double s : point.impulse.samples) {
            if (s != 0.0) {
                ++poses_with_signal;
                break;
            }
        }
    }
    const double elapsed = seconds_since(start);
    detail = format("%zu/15 poses with facets, %zu with signal, %.2f s (limit 10)",
                    poses_with_facets, poses_with_signal, elapsed);
    return report.points.size() == 15 && poses_with_facets >= 1 && poses_with_signal >= 1 &&
           elapsed < 10.0;
}

// 10: median wall time grows monotonically with pose count and tree count.
bool criterion_timing(std::string& detail) {
    const auto start = Clock::now();
    const Forest forest;
    SceneBuildInputs inputs = forest.inputs(7);
    inputs.randomization.leaf_count_scale = 2.0; // enough geometry for timing to dominate noise

    CirclePath circle;
    circle.radius = 6.2;
    TrajectorySpec base;
    base.path = circle;
    base.beamwidth_deg = 50.0;

    const TimingTable table =
        timing_sweep({1, 5, 10, 15}, {1, 2, 3, 4, 5}, base, AcousticConfig{}, LeafBeampatternParams{},
                     forest.ref, forest.attachments, inputs, 5, 0);

    const double elapsed = seconds_since(start);
    detail = format("monotone points %s, trees %s, corner medians %.4f/%.4f s, %.0f s (limit 600)",
                    table.monotone_in_points ? "yes" : "no", table.monotone_in_trees ? "yes" : "no",
                    table.median_s.front().front(), table.median_s.back().back(), elapsed);
    return table.monotone_in_points && table.monotone_in_trees && elapsed < 600.0;
}

// 11: two command-line runs with the same config produce byte-identical signals.
bool criterion_rerun(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fe_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const fs::path cfg_path = dir / "config.json";
    {
        std::ofstream out(cfg_path);
        out << "{\n";
        out << "  \"seed\": 4242,\n";
        out << "  \"reference_tree\": \"" << FOLIAGE_DATA_DIR "/reference_tree.txt" << "\",\n";
        out << "  \"ipp\": { \"domain\": [0, 0, 20, 20], \"lambda_max\": 0.0125 },\n";
        out << "  \"trajectory\": { \"kind\": \"circle\", \"center\": [10, 10], \"radius\": 6.2,\n";
        out << "                   \"height\": 1.0, \"points\": 15, \"interval_deg\": 24,\n";
        out << "                   \"beamwidth_deg\": 20 }\n";
        out << "}\n";
    }

    auto run_once = [&](const std::string& out_name) {
        const std::string cmd = std::string(FOLIAGE_CLI_PATH) + " run --config " + cfg_path.string() +
                                " --out " + (dir / out_name).string() + " > /dev/null";
        return std::system(cmd.c_str());
    };
    if (run_once("a") != 0 || run_once("b") != 0) {
        detail = "command-line run failed";
        fs::remove_all(dir);
        return false;
    }

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    std::size_t compared = 0;
    std::size_t different = 0;
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("impulse_", 0) != 0 || entry.path().extension() != ".csv") continue;
        ++compared;
        if (slurp(entry.path()) != slurp(dir / "b" / name)) ++different;
    }
    fs::remove_all(dir);

    detail = format("%zu impulse files compared, %zu differ", compared, different);
    return compared == 15 && different == 0;
}

// 12: the rewriting core reproduces the classic two-symbol growth sequence.
bool criterion_growth(std::string& detail) {
    LSystemSpec spec;
    spec.axiom = "A";
    spec.rules = {{'A', "AB"}, {'B', "A"}};

    const std::vector<std::size_t> want{1, 2, 3, 5, 8, 13};
    std::vector<std::size_t> got;
    for (int i = 0; i < 6; ++i) {
        spec.iterations = i;
        got.push_back(expand(spec).size());
    }
    std::ostringstream str;
    for (std::size_t v : got) str << v << " ";
    detail = "lengths " + str.str() + "(expect 1 2 3 5 8 13)";
    return got == want;
}

struct Criterion {
    int id;
    const char* name;
    bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "silent-outside-lobe", criterion_silence},
    {2, "echo-delay-alignment", criterion_delay},
    {3, "inverse-square-spreading", criterion_spreading},
    {4, "band-limited-support", criterion_band},
    {5, "superposition", criterion_superposition},
    {6, "half-gain-at-half-beamwidth", criterion_half_gain},
    {7, "point-process-statistics", criterion_point_process},
    {8, "cone-query-equivalence", criterion_query_equivalence},
    {9, "single-tree-orbit", criterion_orbit},
    {10, "timing-monotonicity", criterion_timing},
    {11, "rerun-byte-identical", criterion_rerun},
    {12, "rewrite-growth", criterion_growth},
};

} // namespace

int main(int argc, char** argv) {
    int which = 0;
    if (argc > 1) {
        which = std::atoi(argv[1]);
        if (which < 1 || which > 12) {
            std::fprintf(stderr, "usage: %s [criterion 1..12]\n", argv[0]);
            return 2;
        }
    }

    bool all_pass = true;
    for (const Criterion& c : kCriteria) {
        if (which != 0 && c.id != which) continue;
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d %s: %s%s%s\n", c.id, c.name, ok ? "PASS" : "FAIL",
                    detail.empty() ? "" : " - ", detail.c_str());
        std::fflush(stdout);
        if (!ok) all_pass = false;
    }
    return all_pass ? 0 : 1;
}
