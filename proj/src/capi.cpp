#include "foliage_echo.h"

#include <exception>
#include <string>

#include "foliage/config.hpp"
#include "foliage/errors.hpp"
#include "foliage/io.hpp"
#include "foliage/rng.hpp"
#include "foliage/trajectory.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

fe_status status_from_exception() {
    try {
        throw;
    } catch (const foliage::ParseError& e) {
        set_error(e.what());
        return FE_ERR_PARSE;
    } catch (const foliage::ValidationError& e) {
        set_error(e.what());
        return FE_ERR_VALIDATION;
    } catch (const foliage::IoError& e) {
        set_error(e.what());
        return FE_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return FE_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return FE_ERR_INTERNAL;
    }
}

} // namespace

struct fe_config {
    foliage::RunConfig cfg;
    int threads = 0;
};

struct fe_scene {
    foliage::Scene scene;
};

struct fe_run {
    foliage::RunReport report;
    nlohmann::json manifest_config;
    uint64_t seed = 0;
};

namespace {

/// Reference geometry and trunk attachments shared by the generation entry points.
struct GenInputs {
    foliage::ReferenceTree ref;
    std::vector<foliage::BranchAttachment> attachments;
};

GenInputs load_gen_inputs(const foliage::RunConfig& cfg) {
    GenInputs inputs;
    inputs.ref = foliage::load_reference(cfg.reference_tree);
    foliage::validate(cfg.lsystem);
    inputs.attachments = foliage::interpret_trunk(foliage::expand(cfg.lsystem), cfg.lsystem.turtle);
    return inputs;
}

foliage::SceneBuildInputs scene_inputs_from_config(const foliage::RunConfig& cfg) {
    foliage::SceneBuildInputs inputs;
    inputs.master_seed = cfg.seed;
    inputs.domain = cfg.ipp.domain;
    inputs.reference_path = cfg.reference_tree;
    inputs.lsystem = cfg.lsystem;
    inputs.randomization = cfg.randomization;
    return inputs;
}

} // namespace

extern "C" {

const char* fe_last_error_message(void) { return g_last_error.c_str(); }

fe_config* fe_config_load(const char* path) {
    if (!path) {
        set_error("config path is null");
        return nullptr;
    }
    try {
        auto* handle = new fe_config;
        handle->cfg = foliage::load_config(path);
        return handle;
    } catch (...) {
        status_from_exception();
        return nullptr;
    }
}

fe_status fe_config_set_seed(fe_config* cfg, uint64_t seed) {
    if (!cfg) {
        set_error("config handle is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    cfg->cfg.seed = seed;
    return FE_OK;
}

fe_status fe_config_set_threads(fe_config* cfg, int threads) {
    if (!cfg) {
        set_error("config handle is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    if (threads < 0) {
        set_error("thread count must be >= 0");
        return FE_ERR_INVALID_ARGUMENT;
    }
    cfg->threads = threads;
    return FE_OK;
}

fe_status fe_config_set_output_dir(fe_config* cfg, const char* dir) {
    if (!cfg || !dir) {
        set_error("config handle or directory is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    cfg->cfg.output_dir = std::filesystem::path(dir);
    return FE_OK;
}

const char* fe_config_output_dir(const fe_config* cfg) {
    if (!cfg || !cfg->cfg.output_dir) return "";
    return cfg->cfg.output_dir->c_str();
}

void fe_config_free(fe_config* cfg) { delete cfg; }

fe_status fe_gen_tree(const fe_config* cfg, const char* out_path, fe_tree_summary* summary) {
    if (!cfg || !out_path) {
        set_error("config handle or output path is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    try {
        const GenInputs inputs = load_gen_inputs(cfg->cfg);
        foliage::RandomizationParams params = cfg->cfg.randomization;
        params.seed = foliage::derive_seed(cfg->cfg.seed, foliage::SeedStream::Tree, 0);
        const foliage::TreeGeometry tree =
            foliage::randomize_tree(inputs.ref, inputs.attachments, params);
        foliage::save_tree_geometry(tree, out_path);
        if (summary) {
            summary->branch_count = tree.branches.size();
            summary->leaf_count = tree.leaves.size();
            summary->bounding_radius_m = tree.bounding_radius;
        }
        return FE_OK;
    } catch (...) {
        return status_from_exception();
    }
}

fe_scene* fe_scene_generate(const fe_config* cfg) {
    if (!cfg) {
        set_error("config handle is null");
        return nullptr;
    }
    try {
        const GenInputs inputs = load_gen_inputs(cfg->cfg);
        const std::vector<foliage::Vec2> positions = foliage::sample_ipp(foliage::make_ipp_config(cfg->cfg));
        auto* handle = new fe_scene;
        handle->scene =
            foliage::build_scene(positions, inputs.ref, inputs.attachments, scene_inputs_from_config(cfg->cfg));
        return handle;
    } catch (...) {
        status_from_exception();
        return nullptr;
    }
}

fe_scene* fe_scene_load(const char* path) {
    if (!path) {
        set_error("scene path is null");
        return nullptr;
    }
    try {
        auto* handle = new fe_scene;
        handle->scene = foliage::load_scene(path);
        return handle;
    } catch (...) {
        status_from_exception();
        return nullptr;
    }
}

fe_status fe_scene_save(const fe_scene* scene, const char* path) {
    if (!scene || !path) {
        set_error("scene handle or path is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    try {
        foliage::save_scene(scene->scene, path);
        return FE_OK;
    } catch (...) {
        return status_from_exception();
    }
}

fe_status fe_scene_tree_count(const fe_scene* scene, size_t* count) {
    if (!scene || !count) {
        set_error("scene handle or output pointer is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    *count = scene->scene.placements.size();
    return FE_OK;
}

fe_status fe_scene_facet_count(const fe_scene* scene, size_t* count) {
    if (!scene || !count) {
        set_error("scene handle or output pointer is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    *count = scene->scene.disks.size();
    return FE_OK;
}

void fe_scene_free(fe_scene* scene) { delete scene; }

fe_run* fe_run_trajectory(const fe_config* cfg, const fe_scene* scene) {
    if (!cfg || !scene) {
        set_error("config or scene handle is null");
        return nullptr;
    }
    try {
        auto* handle = new fe_run;
        handle->report = foliage::run_trajectory(cfg->cfg.trajectory, scene->scene, cfg->cfg.acoustic,
                                                 cfg->cfg.leaf, cfg->threads);
        handle->manifest_config = cfg->cfg.raw;
        handle->seed = cfg->cfg.seed;
        return handle;
    } catch (...) {
        status_from_exception();
        return nullptr;
    }
}

fe_status fe_run_export(const fe_run* run, const char* out_dir) {
    if (!run || !out_dir) {
        set_error("run handle or output directory is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    try {
        foliage::export_run(run->report, run->manifest_config, run->seed, out_dir);
        return FE_OK;
    } catch (...) {
        return status_from_exception();
    }
}

fe_status fe_run_point_count(const fe_run* run, size_t* count) {
    if (!run || !count) {
        set_error("run handle or output pointer is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    *count = run->report.points.size();
    return FE_OK;
}

fe_status fe_run_facet_count(const fe_run* run, size_t point, size_t* count) {
    if (!run || !count) {
        set_error("run handle or output pointer is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    if (point >= run->report.points.size()) {
        set_error("point index out of range");
        return FE_ERR_INVALID_ARGUMENT;
    }
    *count = run->report.points[point].facet_count;
    return FE_OK;
}

fe_status fe_run_total_wall_s(const fe_run* run, double* seconds) {
    if (!run || !seconds) {
        set_error("run handle or output pointer is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    *seconds = run->report.total_wall_s;
    return FE_OK;
}

void fe_run_free(fe_run* run) { delete run; }

fe_status fe_timing_sweep(const fe_config* cfg, const char* out_csv, fe_timing_flags* flags) {
    if (!cfg || !out_csv) {
        set_error("config handle or output path is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    try {
        const GenInputs inputs = load_gen_inputs(cfg->cfg);
        const foliage::TimingTable table = foliage::timing_sweep(
            cfg->cfg.timing.point_counts, cfg->cfg.timing.tree_counts, cfg->cfg.trajectory,
            cfg->cfg.acoustic, cfg->cfg.leaf, inputs.ref, inputs.attachments,
            scene_inputs_from_config(cfg->cfg), cfg->cfg.timing.repetitions, cfg->threads);
        foliage::write_timing_csv(table, out_csv);
        if (flags) {
            flags->monotone_in_points = table.monotone_in_points ? 1 : 0;
            flags->monotone_in_trees = table.monotone_in_trees ? 1 : 0;
            flags->rows = table.point_counts.size();
            flags->cols = table.tree_counts.size();
        }
        return FE_OK;
    } catch (...) {
        return status_from_exception();
    }
}

fe_status fe_plot_data(const char* run_dir, size_t* files_written) {
    if (!run_dir) {
        set_error("run directory is null");
        return FE_ERR_INVALID_ARGUMENT;
    }
    try {
        const size_t n = foliage::write_plot_data(run_dir);
        if (files_written) *files_written = n;
        return FE_OK;
    } catch (...) {
        return status_from_exception();
    }
}

} // extern "C"
