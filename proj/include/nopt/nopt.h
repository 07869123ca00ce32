/* C interface to the nopt optimizer library.
 *
 * Every function returns a nopt_status; on failure nopt_last_error() returns
 * a message for the calling thread that stays valid until that thread's next
 * call into the library. Handles are opaque and owned by the caller, who
 * releases them with the matching *_free function. */
#ifndef NOPT_H
#define NOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef NOPT_BUILDING_LIBRARY
#    define NOPT_API __declspec(dllexport)
#  else
#    define NOPT_API __declspec(dllimport)
#  endif
#else
#  define NOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nopt_status {
    NOPT_OK = 0,
    NOPT_ERR_INTERNAL = 1,
    NOPT_ERR_CONFIG = 2,
    NOPT_ERR_DIVERGED = 3,
    NOPT_ERR_IO = 4,
    NOPT_ERR_FORMAT = 5,
    NOPT_ERR_INVALID_ARGUMENT = 6,
    NOPT_ERR_CHECK_FAILED = 7
} nopt_status;

typedef struct nopt_config nopt_config;
typedef struct nopt_checkpoint nopt_checkpoint;

typedef struct nopt_train_summary {
    int64_t total_steps;
    size_t steps_per_epoch;
    double final_train_loss;
    double final_train_acc;
    double final_eval_loss;
    double final_eval_acc;
    int diverged;
} nopt_train_summary;

typedef struct nopt_gradcheck_summary {
    size_t points;
    double max_grad_rel_error;
    double max_hvp_rel_error;
    double max_curvature_rel_error;
    double max_symmetry_error;
    double grad_tol;
    double hvp_tol;
    int passed;
} nopt_gradcheck_summary;

NOPT_API const char* nopt_version(void);
NOPT_API const char* nopt_last_error(void);
NOPT_API const char* nopt_status_string(nopt_status status);

/* Configuration: `key = value` text, see README for the keys. */
NOPT_API nopt_status nopt_config_load(const char* path, nopt_config** out);
NOPT_API nopt_status nopt_config_parse(const char* text, nopt_config** out);
NOPT_API nopt_status nopt_config_set(nopt_config* config, const char* key, const char* value);
/* Pointer stays valid until the config is modified or freed. */
NOPT_API const char* nopt_config_output_dir(const nopt_config* config);
NOPT_API void nopt_config_free(nopt_config* config);

/* out_dir may be NULL to use the config's output directory. `summary` may be
 * NULL. Returns NOPT_ERR_DIVERGED (partial metrics written) on divergence. */
NOPT_API nopt_status nopt_train(const nopt_config* config, const char* out_dir, nopt_train_summary* summary);

/* Writes compare.csv and compare_summary.csv into out_dir (NULL: the first
 * config's output directory). */
NOPT_API nopt_status nopt_compare(const nopt_config* const* configs, size_t count, const char* out_dir);

/* k = 0 uses the config's probe.k. `n_records` may be NULL. */
NOPT_API nopt_status nopt_eigenprobe(const nopt_config* config, const char* pattern, size_t k, const char* out_dir,
                                     size_t* n_records);

/* Returns NOPT_ERR_CHECK_FAILED when any point exceeds its tolerance; the
 * summary is filled in either way. */
NOPT_API nopt_status nopt_gradcheck(const nopt_config* config, nopt_gradcheck_summary* summary);

NOPT_API nopt_status nopt_checkpoint_write(const char* path, const double* values, size_t count, const char* optimizer,
                                           uint64_t step);
NOPT_API nopt_status nopt_checkpoint_read(const char* path, nopt_checkpoint** out);
NOPT_API size_t nopt_checkpoint_size(const nopt_checkpoint* ckpt);
NOPT_API const double* nopt_checkpoint_values(const nopt_checkpoint* ckpt);
NOPT_API const char* nopt_checkpoint_optimizer(const nopt_checkpoint* ckpt);
NOPT_API uint64_t nopt_checkpoint_step(const nopt_checkpoint* ckpt);
NOPT_API void nopt_checkpoint_free(nopt_checkpoint* ckpt);

#ifdef __cplusplus
}
#endif

#endif /* NOPT_H */
