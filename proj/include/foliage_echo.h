#ifndef FOLIAGE_ECHO_H
#define FOLIAGE_ECHO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FE_API __declspec(dllexport)
#else
#define FE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fe_status {
    FE_OK = 0,
    FE_ERR_INVALID_ARGUMENT = 1,
    FE_ERR_PARSE = 2,
    FE_ERR_VALIDATION = 3,
    FE_ERR_IO = 4,
    FE_ERR_INTERNAL = 5
} fe_status;

typedef struct fe_config fe_config;
typedef struct fe_scene fe_scene;
typedef struct fe_run fe_run;

typedef struct fe_tree_summary {
    size_t branch_count;
    size_t leaf_count;
    double bounding_radius_m;
} fe_tree_summary;

typedef struct fe_timing_flags {
    int monotone_in_points;
    int monotone_in_trees;
    size_t rows;
    size_t cols;
} fe_timing_flags;

/* Message for the last failure on this thread; empty string if none. */
FE_API const char* fe_last_error_message(void);

/* ---- configuration ---- */
FE_API fe_config* fe_config_load(const char* path);
FE_API fe_status fe_config_set_seed(fe_config* cfg, uint64_t seed);
FE_API fe_status fe_config_set_threads(fe_config* cfg, int threads); /* 0 = auto */
FE_API fe_status fe_config_set_output_dir(fe_config* cfg, const char* dir);
/* Configured output directory, or "" when unset. Valid while cfg lives. */
FE_API const char* fe_config_output_dir(const fe_config* cfg);
FE_API void fe_config_free(fe_config* cfg);

/* ---- tree generation ---- */
/* Writes one randomized tree to out_path; summary may be NULL. */
FE_API fe_status fe_gen_tree(const fe_config* cfg, const char* out_path, fe_tree_summary* summary);

/* ---- scenes ---- */
FE_API fe_scene* fe_scene_generate(const fe_config* cfg);
FE_API fe_scene* fe_scene_load(const char* path);
FE_API fe_status fe_scene_save(const fe_scene* scene, const char* path);
FE_API fe_status fe_scene_tree_count(const fe_scene* scene, size_t* count);
FE_API fe_status fe_scene_facet_count(const fe_scene* scene, size_t* count);
FE_API void fe_scene_free(fe_scene* scene);

/* ---- trajectory runs ---- */
FE_API fe_run* fe_run_trajectory(const fe_config* cfg, const fe_scene* scene);
FE_API fe_status fe_run_export(const fe_run* run, const char* out_dir);
FE_API fe_status fe_run_point_count(const fe_run* run, size_t* count);
FE_API fe_status fe_run_facet_count(const fe_run* run, size_t point, size_t* count);
FE_API fe_status fe_run_total_wall_s(const fe_run* run, double* seconds);
FE_API void fe_run_free(fe_run* run);

/* ---- timing sweep ---- */
/* Runs the configured sweep, writes the median table CSV to out_csv, and
 * reports the monotonicity flags; flags may be NULL. */
FE_API fe_status fe_timing_sweep(const fe_config* cfg, const char* out_csv, fe_timing_flags* flags);

/* ---- plot data ---- */
/* Emits plot_NNN.json next to each impulse_NNN.csv in run_dir. */
FE_API fe_status fe_plot_data(const char* run_dir, size_t* files_written);

#ifdef __cplusplus
}
#endif

#endif /* FOLIAGE_ECHO_H */
