#ifndef VIEWGP_VIEWGP_H
#define VIEWGP_VIEWGP_H

/* C interface to the viewgp library. Every call returns a vgp_status; on
 * failure vgp_last_error() describes the problem (per thread). Matrices are
 * row-major. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VIEWGP_BUILDING)
#    define VGP_API __declspec(dllexport)
#  else
#    define VGP_API __declspec(dllimport)
#  endif
#else
#  define VGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes. */
typedef enum vgp_status {
  VGP_OK = 0,
  VGP_ERR_INPUT = 2,
  VGP_ERR_IO = 3,
  VGP_ERR_EMPTY = 4,
  VGP_ERR_NUMERICAL = 5,
  VGP_ERR_INTERNAL = 70
} vgp_status;

/* Camera position and orientation as a unit quaternion (w, x, y, z). */
typedef struct vgp_pose {
  double p[3];
  double q[4];
} vgp_pose;

typedef struct vgp_kernel vgp_kernel;
typedef struct vgp_posterior vgp_posterior;

VGP_API const char* vgp_version(void);
VGP_API const char* vgp_last_error(void);

/* Kernel from a JSON document such as {"family":"view_iso","params":{"lengthscale":0.5}}. */
VGP_API vgp_status vgp_kernel_from_json(const char* json, vgp_kernel** out);
VGP_API void vgp_kernel_free(vgp_kernel* kernel);
/* Canonical JSON of the kernel; the string lives until the next call on this thread. */
VGP_API const char* vgp_kernel_to_json(const vgp_kernel* kernel);
VGP_API vgp_status vgp_kernel_eval(const vgp_kernel* kernel, const vgp_pose* a, const vgp_pose* b, double* out);
/* n x n Gram matrix with `jitter` added to the diagonal. */
VGP_API vgp_status vgp_gram_matrix(const vgp_kernel* kernel, const vgp_pose* poses, size_t n, double jitter,
                                   double* out);

/* targets: n x d. */
VGP_API vgp_status vgp_gp_fit(const vgp_kernel* kernel, const vgp_pose* inputs, size_t n, const double* targets,
                              size_t d, double noise_variance, vgp_posterior** out);
VGP_API void vgp_posterior_free(vgp_posterior* posterior);
VGP_API size_t vgp_posterior_output_dim(const vgp_posterior* posterior);
/* mean: m x d; variance: m (latent, noise excluded). Either may be NULL. */
VGP_API vgp_status vgp_gp_predict(const vgp_posterior* posterior, const vgp_pose* query, size_t m, double* mean,
                                  double* variance);
/* out: count blocks of m x d. */
VGP_API vgp_status vgp_gp_sample(const vgp_posterior* posterior, const vgp_pose* query, size_t m, int count,
                                 uint64_t seed, double* out);
VGP_API vgp_status vgp_gp_log_marginal_likelihood(const vgp_kernel* kernel, const vgp_pose* inputs, size_t n,
                                                  const double* targets, size_t d, double noise_variance,
                                                  double* out);

/* Subcommands. Call the matching *_init first to get defaults; string
 * fields may be NULL when optional. */

typedef struct vgp_kernel_matrix_args {
  const char* poses_path;
  const char* kernel; /* JSON text or path */
  const char* out_path;
  double jitter;
} vgp_kernel_matrix_args;
VGP_API void vgp_kernel_matrix_args_init(vgp_kernel_matrix_args* args);
VGP_API vgp_status vgp_cmd_kernel_matrix(const vgp_kernel_matrix_args* args);

typedef struct vgp_synth_args {
  const char* config_path;
  const char* out_dir;
  int has_seed;
  uint64_t seed;
} vgp_synth_args;
VGP_API void vgp_synth_args_init(vgp_synth_args* args);
VGP_API vgp_status vgp_cmd_synth(const vgp_synth_args* args);

typedef struct vgp_track_experiment_args {
  const char* tracks_path;
  const char* poses_path;
  const char* kernels; /* JSON list, text or path; NULL for the default comparison set */
  const char* out_dir;
  const char* hyper;   /* "fixed", "independent" or "transfer" */
  double noise_variance;
  int max_iters;
  double gradient_tolerance;
  double jitter;
  uint64_t seed;
} vgp_track_experiment_args;
VGP_API void vgp_track_experiment_args_init(vgp_track_experiment_args* args);
VGP_API vgp_status vgp_cmd_track_experiment(const vgp_track_experiment_args* args);

typedef struct vgp_interp_args {
  const char* poses_path;
  const char* codes_path;
  int synthetic;
  const char* mode;   /* "endpoints", "all-frames" or "linear" */
  const char* kernel; /* NULL for view_iso at the face preset */
  double noise_variance;
  const char* out_dir;
  int has_seed;
  uint64_t seed;
  int dim;
  int frames;
  double gen_variance;
  double gen_lengthscale;
  double jitter;
} vgp_interp_args;
VGP_API void vgp_interp_args_init(vgp_interp_args* args);
VGP_API vgp_status vgp_cmd_interp(const vgp_interp_args* args);

typedef struct vgp_figures_args {
  int resolution;
  double lengthscale;
  const char* measures; /* comma-separated; NULL for all four */
  const char* out_dir;
  const char* poses_path;
  double translation_lengthscale;
  double view_lengthscale;
  double jitter;
} vgp_figures_args;
VGP_API void vgp_figures_args_init(vgp_figures_args* args);
VGP_API vgp_status vgp_cmd_figures(const vgp_figures_args* args);

#ifdef __cplusplus
}
#endif

#endif /* VIEWGP_VIEWGP_H */
