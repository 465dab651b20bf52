#include "viewgp/viewgp.h"

#include <new>
#include <sstream>
#include <string>

#include "viewgp/commands.hpp"
#include "viewgp/error.hpp"
#include "viewgp/gp.hpp"
#include "viewgp/io.hpp"

struct vgp_kernel {
  viewgp::KernelSpec spec;
};

struct vgp_posterior {
  viewgp::GPPosterior post;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_json;

vgp_status fail(vgp_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class Body>
vgp_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return VGP_OK;
  } catch (const viewgp::Error& e) {
    return fail(static_cast<vgp_status>(viewgp::exit_code(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VGP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VGP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VGP_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) viewgp::throw_invalid(what);
}

viewgp::Pose to_pose(const vgp_pose& p) {
  viewgp::Pose out;
  out.p = {p.p[0], p.p[1], p.p[2]};
  out.R = viewgp::quat_to_matrix(viewgp::UnitQuaternion(p.q[0], p.q[1], p.q[2], p.q[3]));
  return out;
}

std::vector<viewgp::Pose> to_poses(const vgp_pose* poses, size_t n) {
  require(n == 0 || poses, "pose array is NULL");
  std::vector<viewgp::Pose> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(to_pose(poses[i]));
  return out;
}

Eigen::MatrixXd to_matrix(const double* data, size_t rows, size_t cols) {
  require(rows * cols == 0 || data, "matrix data is NULL");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[i * cols + j];
  return m;
}

void from_matrix(const Eigen::MatrixXd& m, double* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
}

std::string str(const char* s) { return s ? s : ""; }

}  // namespace

extern "C" {

const char* vgp_version(void) { return "1.0.0"; }

const char* vgp_last_error(void) { return last_error.c_str(); }

vgp_status vgp_kernel_from_json(const char* json, vgp_kernel** out) {
  return guarded([&] {
    require(json && out, "NULL argument");
    *out = nullptr;
    auto spec = viewgp::io::kernel_from_json(viewgp::io::load_json_argument(json));
    *out = new vgp_kernel{std::move(spec)};
  });
}

void vgp_kernel_free(vgp_kernel* kernel) { delete kernel; }

const char* vgp_kernel_to_json(const vgp_kernel* kernel) {
  if (!kernel) return nullptr;
  last_json = viewgp::io::kernel_to_json(kernel->spec).dump();
  return last_json.c_str();
}

vgp_status vgp_kernel_eval(const vgp_kernel* kernel, const vgp_pose* a, const vgp_pose* b, double* out) {
  return guarded([&] {
    require(kernel && a && b && out, "NULL argument");
    *out = viewgp::evaluate(kernel->spec, to_pose(*a), to_pose(*b));
  });
}

vgp_status vgp_gram_matrix(const vgp_kernel* kernel, const vgp_pose* poses, size_t n, double jitter, double* out) {
  return guarded([&] {
    require(kernel && out, "NULL argument");
    from_matrix(viewgp::gram_matrix(kernel->spec, to_poses(poses, n), jitter), out);
  });
}

vgp_status vgp_gp_fit(const vgp_kernel* kernel, const vgp_pose* inputs, size_t n, const double* targets, size_t d,
                      double noise_variance, vgp_posterior** out) {
  return guarded([&] {
    require(kernel && out, "NULL argument");
    *out = nullptr;
    viewgp::RegressionProblem problem{to_poses(inputs, n), to_matrix(targets, n, d), noise_variance, kernel->spec};
    *out = new vgp_posterior{viewgp::fit(problem)};
  });
}

void vgp_posterior_free(vgp_posterior* posterior) { delete posterior; }

size_t vgp_posterior_output_dim(const vgp_posterior* posterior) {
  return posterior ? static_cast<size_t>(posterior->post.alpha().cols()) : 0;
}

vgp_status vgp_gp_predict(const vgp_posterior* posterior, const vgp_pose* query, size_t m, double* mean,
                          double* variance) {
  return guarded([&] {
    require(posterior != nullptr, "NULL posterior");
    const auto pred = viewgp::predict(posterior->post, to_poses(query, m));
    if (mean) from_matrix(pred.mean, mean);
    if (variance)
      for (size_t i = 0; i < m; ++i) variance[i] = pred.variance[static_cast<Eigen::Index>(i)];
  });
}

vgp_status vgp_gp_sample(const vgp_posterior* posterior, const vgp_pose* query, size_t m, int count, uint64_t seed,
                         double* out) {
  return guarded([&] {
    require(posterior && out, "NULL argument");
    const auto samples = viewgp::sample_posterior(posterior->post, to_poses(query, m), count, seed);
    const size_t block = m * static_cast<size_t>(posterior->post.alpha().cols());
    for (size_t s = 0; s < samples.size(); ++s) from_matrix(samples[s], out + s * block);
  });
}

vgp_status vgp_gp_log_marginal_likelihood(const vgp_kernel* kernel, const vgp_pose* inputs, size_t n,
                                          const double* targets, size_t d, double noise_variance, double* out) {
  return guarded([&] {
    require(kernel && out, "NULL argument");
    viewgp::RegressionProblem problem{to_poses(inputs, n), to_matrix(targets, n, d), noise_variance, kernel->spec};
    *out = viewgp::log_marginal_likelihood(problem);
  });
}

void vgp_kernel_matrix_args_init(vgp_kernel_matrix_args* args) {
  if (args) *args = vgp_kernel_matrix_args{nullptr, nullptr, nullptr, 0.0};
}

vgp_status vgp_cmd_kernel_matrix(const vgp_kernel_matrix_args* args) {
  return guarded([&] {
    require(args && args->poses_path && args->kernel, "kernel-matrix needs poses and a kernel");
    viewgp::cli::cmd_kernel_matrix({args->poses_path, args->kernel, str(args->out_path), args->jitter});
  });
}

void vgp_synth_args_init(vgp_synth_args* args) {
  if (args) *args = vgp_synth_args{nullptr, nullptr, 0, 0};
}

vgp_status vgp_cmd_synth(const vgp_synth_args* args) {
  return guarded([&] {
    require(args && args->config_path, "synth needs a config file");
    viewgp::cli::SynthArgs a;
    a.config_path = args->config_path;
    a.out_dir = str(args->out_dir);
    if (args->has_seed) a.seed = args->seed;
    viewgp::cli::cmd_synth(a);
  });
}

void vgp_track_experiment_args_init(vgp_track_experiment_args* args) {
  if (!args) return;
  const viewgp::cli::TrackExperimentArgs d;
  *args = vgp_track_experiment_args{nullptr,          nullptr, nullptr,
                                    nullptr,          "transfer",
                                    d.noise_variance, d.optimizer.max_iters,
                                    d.optimizer.gradient_tolerance,
                                    d.jitter,         0};
}

vgp_status vgp_cmd_track_experiment(const vgp_track_experiment_args* args) {
  return guarded([&] {
    require(args && args->tracks_path && args->poses_path, "track-experiment needs tracks and poses");
    viewgp::cli::TrackExperimentArgs a;
    a.tracks_path = args->tracks_path;
    a.poses_path = args->poses_path;
    a.kernels = str(args->kernels);
    a.out_dir = str(args->out_dir);
    if (args->hyper) a.hyper = args->hyper;
    a.noise_variance = args->noise_variance;
    a.optimizer.max_iters = args->max_iters;
    a.optimizer.gradient_tolerance = args->gradient_tolerance;
    a.jitter = args->jitter;
    a.seed = args->seed;
    viewgp::cli::cmd_track_experiment(a);
  });
}

void vgp_interp_args_init(vgp_interp_args* args) {
  if (!args) return;
  const viewgp::cli::InterpArgs d;
  *args = vgp_interp_args{nullptr, nullptr, 0,       "endpoints", nullptr,         d.noise_variance, nullptr,
                          0,       0,       d.dim,   d.frames,    d.gen_variance, d.gen_lengthscale, d.jitter};
}

vgp_status vgp_cmd_interp(const vgp_interp_args* args) {
  return guarded([&] {
    require(args != nullptr, "NULL argument");
    viewgp::cli::InterpArgs a;
    a.poses_path = str(args->poses_path);
    a.codes_path = str(args->codes_path);
    a.synthetic = args->synthetic != 0;
    if (args->mode) a.mode = args->mode;
    a.kernel = str(args->kernel);
    a.noise_variance = args->noise_variance;
    a.out_dir = str(args->out_dir);
    if (args->has_seed) a.seed = args->seed;
    a.dim = args->dim;
    a.frames = args->frames;
    a.gen_variance = args->gen_variance;
    a.gen_lengthscale = args->gen_lengthscale;
    a.jitter = args->jitter;
    viewgp::cli::cmd_interp(a);
  });
}

void vgp_figures_args_init(vgp_figures_args* args) {
  if (!args) return;
  const viewgp::cli::FiguresArgs d;
  *args = vgp_figures_args{d.grid.resolution, d.grid.lengthscale, nullptr, nullptr, nullptr,
                           d.translation_lengthscale, d.view_lengthscale, d.jitter};
}

vgp_status vgp_cmd_figures(const vgp_figures_args* args) {
  return guarded([&] {
    require(args != nullptr, "NULL argument");
    viewgp::cli::FiguresArgs a;
    a.grid.resolution = args->resolution;
    a.grid.lengthscale = args->lengthscale;
    if (args->measures) {
      a.grid.measures.clear();
      std::stringstream ss(args->measures);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) a.grid.measures.push_back(viewgp::parse_measure(item));
      require(!a.grid.measures.empty(), "no distance measures given");
    }
    a.out_dir = str(args->out_dir);
    a.poses_path = str(args->poses_path);
    a.translation_lengthscale = args->translation_lengthscale;
    a.view_lengthscale = args->view_lengthscale;
    a.jitter = args->jitter;
    viewgp::cli::cmd_figures(a);
  });
}

}  // extern "C"
