// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "viewgp/viewgp.h"

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> jitter;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help, const std::string& jitter_help) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--jitter", c.jitter, jitter_help)->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, out_help)->required();
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

int report(vgp_status status) {
  if (status != VGP_OK) std::cerr << "error: " << vgp_last_error() << '\n';
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera-pose Gaussian-process kernels on SE(3)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vgp_version()));
  app.footer("Threads: set VIEWGP_THREADS (default: all cores).");

  // kernel-matrix
  Common km_c;
  std::string km_poses, km_kernel;
  auto* km = app.add_subcommand("kernel-matrix", "Gram matrix of a kernel over a pose file, as CSV");
  km->add_option("--poses", km_poses, "Pose CSV (frame,px,py,pz,qw,qx,qy,qz)")->required();
  km->add_option("--kernel", km_kernel, "Kernel JSON document, inline or as a file path")->required();
  add_common(km, km_c, "Output CSV path", "Added to the Gram diagonal (default 0)");

  // synth
  Common sy_c;
  std::string sy_config;
  auto* sy = app.add_subcommand("synth", "Synthesize a camera trajectory and pinhole feature tracks");
  sy->add_option("--config", sy_config, "Synth configuration JSON")->required();
  add_common(sy, sy_c, "Output directory (trajectory.csv, tracks.csv)", "Accepted for uniformity; synth builds no matrices");

  // track-experiment
  Common te_c;
  std::string te_tracks, te_poses, te_kernels, te_hyper = "transfer";
  double te_noise = 1.0, te_tol = 1e-5;
  int te_iters = 200;
  auto* te = app.add_subcommand("track-experiment", "Per-track GP prediction of held-out feature positions");
  te->add_option("--tracks", te_tracks, "Track CSV (track,frame,u,v,split)")->required();
  te->add_option("--poses", te_poses, "Pose CSV the track frames refer to")->required();
  te->add_option("--kernels", te_kernels, "JSON list of kernels, inline or as a file path (default: comparison set)");
  te->add_option("--hyper", te_hyper, "Hyperparameters: fixed, independent or transfer")
      ->check(CLI::IsMember({"fixed", "independent", "transfer"}))
      ->capture_default_str();
  te->add_option("--noise", te_noise, "Initial pixel noise variance")->capture_default_str();
  te->add_option("--max-iters", te_iters, "Optimizer iteration cap")->check(CLI::NonNegativeNumber)->capture_default_str();
  te->add_option("--grad-tol", te_tol, "Optimizer gradient tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(te, te_c, "Output directory (report.json, report.txt)", "Initial Cholesky jitter relative to the prior variance (default 1e-8)");

  // interp
  Common ip_c;
  std::string ip_poses, ip_codes, ip_mode = "endpoints", ip_kernel;
  bool ip_synthetic = false;
  vgp_interp_args ip_defaults;
  vgp_interp_args_init(&ip_defaults);
  double ip_noise = ip_defaults.noise_variance, ip_gen_var = ip_defaults.gen_variance,
         ip_gen_len = ip_defaults.gen_lengthscale;
  int ip_dim = ip_defaults.dim, ip_frames = ip_defaults.frames;
  auto* ip = app.add_subcommand("interp", "Interpolate latent codes along a camera path");
  ip->add_option("--poses", ip_poses, "Pose CSV");
  ip->add_option("--codes", ip_codes, "Codes CSV (frame,c0,...)");
  ip->add_flag("--synthetic", ip_synthetic, "Draw codes from the view-kernel prior instead of reading them");
  ip->add_option("--mode", ip_mode, "endpoints, all-frames or linear")->capture_default_str();
  ip->add_option("--kernel", ip_kernel, "Kernel JSON (default: view_iso, variance 0.1, lengthscale 1.098)");
  ip->add_option("--noise", ip_noise, "Observation noise variance")->capture_default_str();
  ip->add_option("--dim", ip_dim, "Synthetic code dimension")->check(CLI::PositiveNumber)->capture_default_str();
  ip->add_option("--frames", ip_frames, "Synthetic sweep length when no poses are given")->capture_default_str();
  ip->add_option("--gen-variance", ip_gen_var, "Generating prior variance")->capture_default_str();
  ip->add_option("--gen-lengthscale", ip_gen_len, "Generating prior lengthscale")->capture_default_str();
  add_common(ip, ip_c, "Output directory (predictions.csv, report.json)", "Initial Cholesky jitter relative to the prior variance (default 1e-8)");

  // figures
  Common fg_c;
  vgp_figures_args fg_defaults;
  vgp_figures_args_init(&fg_defaults);
  int fg_res = fg_defaults.resolution;
  double fg_len = fg_defaults.lengthscale, fg_tl = fg_defaults.translation_lengthscale,
         fg_vl = fg_defaults.view_lengthscale;
  std::string fg_measures, fg_poses;
  auto* fg = app.add_subcommand("figures", "Distance and covariance matrices over a 2-DoF rotation grid");
  fg->add_option("--resolution", fg_res, "Grid points per axis over [-pi, pi]")->capture_default_str();
  fg->add_option("--lengthscale", fg_len, "Covariance lengthscale")->capture_default_str();
  fg->add_option("--measures", fg_measures, "Comma-separated subset of geodesic,quaternion,separable,view");
  fg->add_option("--poses", fg_poses, "Also emit translation/orientation covariances over this pose CSV");
  fg->add_option("--translation-lengthscale", fg_tl, "Lengthscale for the translation covariance")->capture_default_str();
  fg->add_option("--view-lengthscale", fg_vl, "Lengthscale for the orientation covariance")->capture_default_str();
  add_common(fg, fg_c, "Output directory", "Added to the trajectory covariance diagonals (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : VGP_ERR_INPUT;
  }

  if (km->parsed()) {
    vgp_kernel_matrix_args a;
    vgp_kernel_matrix_args_init(&a);
    a.poses_path = km_poses.c_str();
    a.kernel = km_kernel.c_str();
    a.out_path = km_c.out.c_str();
    if (km_c.jitter) a.jitter = *km_c.jitter;
    return report(vgp_cmd_kernel_matrix(&a));
  }
  if (sy->parsed()) {
    vgp_synth_args a;
    vgp_synth_args_init(&a);
    a.config_path = sy_config.c_str();
    a.out_dir = sy_c.out.c_str();
    if (sy_c.seed) {
      a.has_seed = 1;
      a.seed = *sy_c.seed;
    }
    return report(vgp_cmd_synth(&a));
  }
  if (te->parsed()) {
    vgp_track_experiment_args a;
    vgp_track_experiment_args_init(&a);
    a.tracks_path = te_tracks.c_str();
    a.poses_path = te_poses.c_str();
    a.kernels = opt(te_kernels);
    a.out_dir = te_c.out.c_str();
    a.hyper = te_hyper.c_str();
    a.noise_variance = te_noise;
    a.max_iters = te_iters;
    a.gradient_tolerance = te_tol;
    if (te_c.jitter) a.jitter = *te_c.jitter;
    if (te_c.seed) a.seed = *te_c.seed;
    const int code = report(vgp_cmd_track_experiment(&a));
    if (code == 0) {
      std::ifstream in(te_c.out + "/report.txt");
      std::cout << in.rdbuf();
    }
    return code;
  }
  if (ip->parsed()) {
    vgp_interp_args a = ip_defaults;
    a.poses_path = opt(ip_poses);
    a.codes_path = opt(ip_codes);
    a.synthetic = ip_synthetic ? 1 : 0;
    a.mode = ip_mode.c_str();
    a.kernel = opt(ip_kernel);
    a.noise_variance = ip_noise;
    a.out_dir = ip_c.out.c_str();
    if (ip_c.seed) {
      a.has_seed = 1;
      a.seed = *ip_c.seed;
    }
    a.dim = ip_dim;
    a.frames = ip_frames;
    a.gen_variance = ip_gen_var;
    a.gen_lengthscale = ip_gen_len;
    if (ip_c.jitter) a.jitter = *ip_c.jitter;
    return report(vgp_cmd_interp(&a));
  }
  if (fg->parsed()) {
    vgp_figures_args a = fg_defaults;
    a.resolution = fg_res;
    a.lengthscale = fg_len;
    a.measures = opt(fg_measures);
    a.out_dir = fg_c.out.c_str();
    a.poses_path = opt(fg_poses);
    a.translation_lengthscale = fg_tl;
    a.view_lengthscale = fg_vl;
    if (fg_c.jitter) a.jitter = *fg_c.jitter;
    return report(vgp_cmd_figures(&a));
  }
  return VGP_ERR_INPUT;
}
