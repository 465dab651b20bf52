#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "viewgp/kernels.hpp"

namespace viewgp {

/// d independent outputs over shared pose inputs: y_ji = f_i(P_j) + noise.
struct RegressionProblem {
  std::vector<Pose> inputs;
  Eigen::MatrixXd targets;  // n x d
  double noise_variance = 0.0;
  KernelSpec kernel = ViewIsoParams{};
  /// Initial diagonal jitter, relative to the mean prior variance.
  double jitter = 1e-8;
};

/// Name under which the noise variance appears among optimizable parameters.
inline constexpr const char* kNoiseVariance = "noise_variance";

/// Face-interpolation preset: sigma^2 = 0.1, l = 1.098, noise 1e-4.
struct ViewPreset {
  static constexpr double kVariance = 0.1;
  static constexpr double kLengthscale = 1.098;
  static constexpr double kNoiseVariance = 1e-4;
};

/// Jittered Cholesky of a covariance matrix. The jitter starts at
/// relative * scale and doubles up to max(1e-4, relative) * scale.
struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};
JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& covariance, double scale, double relative = 1e-8);

/// Immutable fitted state; safe to share between threads for predict().
class GPPosterior {
 public:
  GPPosterior(std::vector<Pose> inputs, KernelSpec kernel, double noise_variance, JitteredCholesky factor,
              Eigen::MatrixXd alpha);

  const std::vector<Pose>& inputs() const { return inputs_; }
  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  double jitter() const { return factor_.jitter; }
  /// Lower-triangular L with L L^T = K + noise I + jitter I.
  Eigen::MatrixXd cholesky_factor() const { return factor_.llt.matrixL(); }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return factor_.llt; }
  const Eigen::MatrixXd& alpha() const { return alpha_; }

 private:
  std::vector<Pose> inputs_;
  KernelSpec kernel_;
  double noise_variance_;
  JitteredCholesky factor_;
  Eigen::MatrixXd alpha_;
};

struct Prediction {
  Eigen::MatrixXd mean;      // m x d
  Eigen::VectorXd variance;  // m, latent (noise-free), shared across outputs
};

GPPosterior fit(const RegressionProblem& problem);
Prediction predict(const GPPosterior& posterior, std::span<const Pose> query);
/// `count` joint draws of the latent function over the query set, each m x d.
std::vector<Eigen::MatrixXd> sample_posterior(const GPPosterior& posterior, std::span<const Pose> query,
                                              int count, std::uint64_t seed);

double log_marginal_likelihood(const RegressionProblem& problem);

struct OptimizerConfig {
  int max_iters = 200;
  double gradient_tolerance = 1e-5;
  double fd_step = 1e-5;
};

struct OptimizationResult {
  KernelSpec kernel;
  double noise_variance = 0.0;
  std::vector<double> trace;  // objective after every accepted step, starting value first
};

/// Sum of log marginal likelihoods; every problem is evaluated with the
/// kernel and noise of `problems.front()` overridden by `params`.
class HyperObjective {
 public:
  HyperObjective(std::span<const RegressionProblem> problems, std::vector<std::string> free);

  const std::vector<std::string>& names() const { return names_; }
  /// Current values of the free parameters, in log space.
  Eigen::VectorXd initial_log_params() const;
  /// -inf when any factorization fails.
  double operator()(const Eigen::VectorXd& log_params) const;
  /// Central finite differences in log space.
  Eigen::VectorXd gradient(const Eigen::VectorXd& log_params, double step) const;
  void apply(const Eigen::VectorXd& log_params, KernelSpec& kernel, double& noise_variance) const;

 private:
  std::span<const RegressionProblem> problems_;
  std::vector<std::string> names_;
};

/// Gradient ascent with backtracking on log-parameters. The problems share
/// hyperparameters (their marginal likelihoods are summed); the kernel and
/// noise of the first problem are the starting point.
OptimizationResult optimize_hyperparameters(std::span<const RegressionProblem> problems,
                                            const std::vector<std::string>& free,
                                            const OptimizerConfig& config = {});
OptimizationResult optimize_hyperparameters(const RegressionProblem& problem,
                                            const std::vector<std::string>& free,
                                            const OptimizerConfig& config = {});

/// Kernel parameters plus noise_variance, minus "orientation.variance" of a
/// product kernel (it only rescales "translation.variance").
std::vector<std::string> default_free_parameters(const KernelSpec& kernel);

struct Metrics {
  double rmse = 0.0;
  double nlpd = 0.0;
};

/// RMSE and mean negative log N(truth; mean, variance + noise) over all entries.
Metrics metrics_rmse_nlpd(const Prediction& prediction, const Eigen::MatrixXd& truth, double noise_variance);

}  // namespace viewgp
