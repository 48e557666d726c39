#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "foliage_echo.h"

namespace {

struct ConfigDeleter {
    void operator()(fe_config* c) const { fe_config_free(c); }
};
struct SceneDeleter {
    void operator()(fe_scene* s) const { fe_scene_free(s); }
};
struct RunDeleter {
    void operator()(fe_run* r) const { fe_run_free(r); }
};
using ConfigPtr = std::unique_ptr<fe_config, ConfigDeleter>;
using ScenePtr = std::unique_ptr<fe_scene, SceneDeleter>;
using RunPtr = std::unique_ptr<fe_run, RunDeleter>;

int fail(const std::string& context) {
    std::cerr << "error: " << context << ": " << fe_last_error_message() << "\n";
    return 1;
}

/// --threads beats FOLIAGE_ECHO_THREADS beats auto (0).
int resolve_thread_request(const std::optional<int>& flag, bool& ok) {
    ok = true;
    if (flag) return *flag;
    if (const char* env = std::getenv("FOLIAGE_ECHO_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || value < 0) {
            std::cerr << "error: FOLIAGE_ECHO_THREADS must be a non-negative integer, got '" << env
                      << "'\n";
            ok = false;
            return 0;
        }
        return static_cast<int>(value);
    }
    return 0;
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_out, bool with_threads) {
    cmd->add_option("--config", opts.config_path, "Path to the run configuration file")->required();
    cmd->add_option("--seed", opts.seed, "Master seed (overrides the config)");
    if (with_out) cmd->add_option("--out", opts.out, "Output path (overrides the config)");
    if (with_threads) {
        cmd->add_option("--threads", opts.threads, "Worker threads, 0 = auto (env FOLIAGE_ECHO_THREADS)");
    }
}

ConfigPtr load_config(const CommonOpts& opts, int& exit_code) {
    ConfigPtr cfg(fe_config_load(opts.config_path.c_str()));
    if (!cfg) {
        exit_code = fail("loading config");
        return nullptr;
    }
    if (opts.seed && fe_config_set_seed(cfg.get(), *opts.seed) != FE_OK) {
        exit_code = fail("setting seed");
        return nullptr;
    }
    bool threads_ok = true;
    const int threads = resolve_thread_request(opts.threads, threads_ok);
    if (!threads_ok) {
        exit_code = 1;
        return nullptr;
    }
    if (fe_config_set_threads(cfg.get(), threads) != FE_OK) {
        exit_code = fail("setting threads");
        return nullptr;
    }
    exit_code = 0;
    return cfg;
}

std::string output_or(const ConfigPtr& cfg, const std::optional<std::string>& out,
                      const std::string& fallback) {
    if (out) return *out;
    const std::string configured = fe_config_output_dir(cfg.get());
    return configured.empty() ? fallback : configured;
}

int cmd_gen_tree(const CommonOpts& opts) {
    int code = 0;
    ConfigPtr cfg = load_config(opts, code);
    if (!cfg) return code;
    const std::string out = opts.out.value_or("tree.txt");
    fe_tree_summary summary{};
    if (fe_gen_tree(cfg.get(), out.c_str(), &summary) != FE_OK) return fail("generating tree");
    std::cout << "wrote " << out << ": " << summary.branch_count << " branches, " << summary.leaf_count
              << " leaves, bounding radius " << summary.bounding_radius_m << " m\n";
    return 0;
}

int cmd_gen_scene(const CommonOpts& opts) {
    int code = 0;
    ConfigPtr cfg = load_config(opts, code);
    if (!cfg) return code;
    const std::string out = opts.out.value_or("scene.json");
    ScenePtr scene(fe_scene_generate(cfg.get()));
    if (!scene) return fail("generating scene");
    if (fe_scene_save(scene.get(), out.c_str()) != FE_OK) return fail("saving scene");
    size_t trees = 0, facets = 0;
    fe_scene_tree_count(scene.get(), &trees);
    fe_scene_facet_count(scene.get(), &facets);
    std::cout << "wrote " << out << ": " << trees << " trees, " << facets << " facets\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::optional<std::string>& scene_path) {
    int code = 0;
    ConfigPtr cfg = load_config(opts, code);
    if (!cfg) return code;
    const std::string out_dir = output_or(cfg, opts.out, "foliage_run");

    ScenePtr scene(scene_path ? fe_scene_load(scene_path->c_str()) : fe_scene_generate(cfg.get()));
    if (!scene) return fail(scene_path ? "loading scene" : "generating scene");

    RunPtr run(fe_run_trajectory(cfg.get(), scene.get()));
    if (!run) return fail("running trajectory");
    if (fe_run_export(run.get(), out_dir.c_str()) != FE_OK) return fail("exporting run");

    size_t points = 0, trees = 0;
    double total = 0.0;
    fe_run_point_count(run.get(), &points);
    fe_scene_tree_count(scene.get(), &trees);
    fe_run_total_wall_s(run.get(), &total);
    std::cout << "wrote " << points << " impulses to " << out_dir << " (" << trees << " trees, "
              << total << " s impulse pipeline)\n";
    return 0;
}

int cmd_timing(const CommonOpts& opts) {
    int code = 0;
    ConfigPtr cfg = load_config(opts, code);
    if (!cfg) return code;
    const std::string out = opts.out.value_or("timing.csv");
    fe_timing_flags flags{};
    if (fe_timing_sweep(cfg.get(), out.c_str(), &flags) != FE_OK) return fail("running timing sweep");

    std::ifstream table(out);
    std::string line;
    while (std::getline(table, line)) std::cout << line << "\n";
    std::cout << "monotone in points: " << (flags.monotone_in_points ? "yes" : "no") << "\n";
    std::cout << "monotone in trees: " << (flags.monotone_in_trees ? "yes" : "no") << "\n";
    return 0;
}

int cmd_plot_data(const std::string& run_dir) {
    size_t files = 0;
    if (fe_plot_data(run_dir.c_str(), &files) != FE_OK) return fail("writing plot data");
    std::cout << "wrote " << files << " plot files in " << run_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foliage echo simulator: procedural tree scenes and sonar impulse synthesis"};
    app.require_subcommand(1);

    CommonOpts tree_opts, scene_opts, run_opts, timing_opts;
    std::optional<std::string> run_scene_path;
    std::string plot_run_dir;

    CLI::App* gen_tree = app.add_subcommand("gen-tree", "Generate one randomized tree geometry file");
    add_common(gen_tree, tree_opts, true, false);

    CLI::App* gen_scene = app.add_subcommand("gen-scene", "Sample tree locations and write a scene file");
    add_common(gen_scene, scene_opts, true, false);

    CLI::App* run = app.add_subcommand("run", "Run the trajectory and export impulses");
    add_common(run, run_opts, true, true);
    run->add_option("--scene", run_scene_path, "Reuse a saved scene file instead of regenerating");

    CLI::App* timing = app.add_subcommand("timing", "Run the timing sweep and write the median table");
    add_common(timing, timing_opts, true, true);

    CLI::App* plot = app.add_subcommand("plot-data", "Emit per-pose plot data for a run directory");
    plot->add_option("run_dir", plot_run_dir, "Run directory with impulse CSV files")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(gen_tree)) return cmd_gen_tree(tree_opts);
    if (app.got_subcommand(gen_scene)) return cmd_gen_scene(scene_opts);
    if (app.got_subcommand(run)) return cmd_run(run_opts, run_scene_path);
    if (app.got_subcommand(timing)) return cmd_timing(timing_opts);
    if (app.got_subcommand(plot)) return cmd_plot_data(plot_run_dir);
    return 1;
}
