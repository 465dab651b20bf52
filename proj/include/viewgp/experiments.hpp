#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "viewgp/camsim.hpp"
#include "viewgp/gp.hpp"
#include "viewgp/kernels.hpp"

namespace viewgp {

// ---------------------------------------------------------------------------
// Feature-track regression
// ---------------------------------------------------------------------------

enum class HyperMode {
  kFixed,        // use the configured hyperparameters as given
  kIndependent,  // maximize the summed marginal likelihood separately per kernel
  kTransfer,     // learn on the translation x view_iso product, reuse for the rest
};

struct TrackExperimentConfig {
  std::vector<KernelSpec> kernels;
  double noise_variance = 1.0;
  HyperMode hyper = HyperMode::kFixed;
  OptimizerConfig optimizer;
  double jitter = 1e-8;  // relative initial jitter, see RegressionProblem
  std::uint64_t seed = 0;
};

struct KernelReport {
  std::string name;
  KernelSpec kernel;  // hyperparameters actually used
  double noise_variance = 0.0;
  double rmse = 0.0;
  double nlpd = 0.0;
  /// Smallest eigenvalue over the per-track Gram matrices (all frames of the
  /// track), no jitter or noise.
  double min_eigenvalue = 0.0;
  /// Summed training log marginal likelihood at the final hyperparameters.
  double log_marginal_likelihood = 0.0;
  std::size_t test_values = 0;
};

struct ExperimentReport {
  std::vector<KernelReport> kernels;
  std::size_t tracks_used = 0;
  std::size_t tracks_skipped = 0;
  HyperMode hyper = HyperMode::kFixed;
  double initial_noise_variance = 0.0;
  std::uint64_t seed = 0;
};

/// Independent u and v GPs per track on the training mask (training mean
/// subtracted, restored after), scored on the test mask. RMSE and NLPD are
/// unweighted means over every test coordinate of every track.
ExperimentReport run_track_experiment(const TrackDataset& dataset, const TrackExperimentConfig& config);

std::string hyper_mode_name(HyperMode mode);
HyperMode parse_hyper_mode(const std::string& name);

// ---------------------------------------------------------------------------
// Latent-sequence interpolation
// ---------------------------------------------------------------------------

struct LatentSequence {
  std::vector<Pose> poses;
  Eigen::MatrixXd codes;  // observed, n x d
  Eigen::MatrixXd truth;  // n x d; equals codes when no ground truth is known
  double noise_variance = 0.0;
};

struct LatentConfig {
  int dim = 64;
  double variance = ViewPreset::kVariance;
  double lengthscale = ViewPreset::kLengthscale;
  double noise_variance = ViewPreset::kNoiseVariance;
  std::uint64_t seed = 0;
};

/// Ground truth drawn jointly from the view_iso GP prior over the poses (one
/// draw per output dimension, shared covariance); observations add white noise.
LatentSequence make_latent_sequence(std::span<const Pose> poses, const LatentConfig& config);

enum class InterpMode { kEndpointsOnly, kAllFrames, kLinearBaseline };

struct InterpResult {
  Eigen::MatrixXd mean;           // n x d
  Eigen::VectorXd frame_mse;      // per frame, averaged over outputs, against truth
  double mean_mse = 0.0;          // average of frame_mse over all frames
  Eigen::VectorXd posterior_std;  // per frame; zero for the linear baseline
};

InterpResult run_interp_experiment(const LatentSequence& seq, InterpMode mode, const KernelSpec& kernel,
                                   double noise_variance, double jitter = 1e-8);

/// Rotation-only sweep with uneven angular speed: a fast 1.2 rad turn
/// followed by a slow 0.45 rad one, `frames` poses in total.
Trajectory sweep_trajectory(int frames);

std::string interp_mode_name(InterpMode mode);
InterpMode parse_interp_mode(const std::string& name);

// ---------------------------------------------------------------------------
// Distance and covariance figures
// ---------------------------------------------------------------------------

enum class DistanceMeasure { kGeodesic, kQuaternion, kSeparable, kView };

struct FigureConfig {
  int resolution = 25;  // grid points per axis over [-pi, pi]
  std::vector<DistanceMeasure> measures{DistanceMeasure::kGeodesic, DistanceMeasure::kQuaternion,
                                        DistanceMeasure::kSeparable, DistanceMeasure::kView};
  double lengthscale = 1.0;
};

struct MeasureFigure {
  DistanceMeasure measure = DistanceMeasure::kView;
  /// N^2 x N^2 over the grid rotations Ry(t2) * Rx(t1), flattened t1-major.
  Eigen::MatrixXd distance;
  Eigen::MatrixXd covariance;  // exp(-d^2 / (2 l^2))
  /// Distance from the identity along t1 = t2 and along t2 = 0, one entry per grid angle.
  Eigen::VectorXd diagonal_slice;
  Eigen::VectorXd theta2_zero_slice;
  Eigen::VectorXd diagonal_covariance_slice;
  Eigen::VectorXd theta2_zero_covariance_slice;
};

struct FigureSet {
  Eigen::VectorXd angles;
  std::vector<MeasureFigure> figures;
};

FigureSet emit_distance_figures(const FigureConfig& config);

/// Rotation of the 2-DoF figure grid.
RotationMatrix figure_rotation(double theta1, double theta2);
/// Pairwise distance between two grid rotations under `measure`.
double figure_distance(DistanceMeasure measure, double a1, double a2, double b1, double b2);

std::string measure_name(DistanceMeasure measure);
DistanceMeasure parse_measure(const std::string& name);

/// Unit-magnitude translation and view_iso Gram matrices over the poses, time-ordered.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> trajectory_covariances(std::span<const Pose> poses,
                                                                   double translation_lengthscale,
                                                                   double view_lengthscale);

}  // namespace viewgp
