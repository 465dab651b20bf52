#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "viewgp/camsim.hpp"
#include "viewgp/experiments.hpp"

namespace viewgp::cli {

struct KernelMatrixArgs {
  std::string poses_path;
  std::string kernel;  // JSON text or a path to it
  std::string out_path;
  double jitter = 0.0;  // added to the diagonal
};
void cmd_kernel_matrix(const KernelMatrixArgs& args);

struct SynthArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
};

struct SynthSetup {
  TrajectoryConfig trajectory;
  CameraIntrinsics camera;
  SynthConfig tracks;
};
/// Parses a synth configuration document; unknown keys are rejected.
SynthSetup parse_synth_config(const std::string& json_text, std::optional<std::uint64_t> seed_override);

struct SynthSummary {
  std::size_t frames = 0;
  std::size_t tracks = 0;
  std::size_t rows = 0;
};
/// Writes trajectory.csv and tracks.csv into out_dir.
SynthSummary cmd_synth(const SynthArgs& args);

struct TrackExperimentArgs {
  std::string tracks_path;
  std::string poses_path;
  std::string kernels;  // JSON list (or one document), text or path; empty = the default comparison set
  std::string out_dir;
  std::string hyper = "transfer";
  double noise_variance = 1.0;
  OptimizerConfig optimizer;
  double jitter = 1e-8;
  std::uint64_t seed = 0;
};
/// The kernels compared when none are given: translation only, translation x
/// {view_iso, quaternion, geodesic, separable_euler}, and linear_extrinsics.
std::vector<KernelSpec> default_comparison_kernels();
/// Writes report.json and report.txt into out_dir; returns the text table.
std::string cmd_track_experiment(const TrackExperimentArgs& args);

struct InterpArgs {
  std::string poses_path;  // optional in synthetic mode
  std::string codes_path;
  bool synthetic = false;
  std::string mode = "endpoints";
  std::string kernel;  // empty = view_iso at the face preset
  double noise_variance = ViewPreset::kNoiseVariance;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // required in synthetic mode
  int dim = 64;
  int frames = 30;
  double gen_variance = ViewPreset::kVariance;
  double gen_lengthscale = ViewPreset::kLengthscale;
  double jitter = 1e-8;
};
/// Writes predictions.csv and report.json (plus poses.csv and codes.csv for
/// synthetic runs) into out_dir.
InterpResult cmd_interp(const InterpArgs& args);

struct FiguresArgs {
  FigureConfig grid;
  std::string out_dir;
  std::string poses_path;  // optional: also emit trajectory covariances
  double translation_lengthscale = 1.0;
  double view_lengthscale = 1.0;
  double jitter = 0.0;  // added to the trajectory covariance diagonals
};
void cmd_figures(const FiguresArgs& args);

}  // namespace viewgp::cli
