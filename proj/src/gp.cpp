#include "viewgp/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "viewgp/error.hpp"

namespace viewgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;  // log(2 pi)

double prior_scale(const Eigen::MatrixXd& K) {
  if (K.rows() == 0) return 1.0;
  const double s = K.diagonal().mean();
  return (std::isfinite(s) && s > 0.0) ? s : 1.0;
}

void check_problem(std::span<const Pose> inputs, const Eigen::MatrixXd& targets, double noise_variance) {
  if (inputs.empty()) throw_invalid("regression problem has no inputs");
  if (targets.rows() != static_cast<Eigen::Index>(inputs.size()))
    throw_invalid("target row count does not match input count");
  if (targets.cols() < 1) throw_invalid("targets need at least one output dimension");
  if (!targets.allFinite()) throw_invalid("targets must be finite");
  if (!std::isfinite(noise_variance) || noise_variance < 0.0)
    throw_invalid("noise variance must be finite and >= 0");
}

struct Factorization {
  JitteredCholesky factor;
  Eigen::MatrixXd alpha;
};

Factorization factorize(std::span<const Pose> inputs, const Eigen::MatrixXd& targets, const KernelSpec& kernel,
                        double noise_variance, double jitter) {
  check_problem(inputs, targets, noise_variance);
  validate(kernel);
  Eigen::MatrixXd K = gram_matrix(kernel, inputs, 0.0);
  const double scale = prior_scale(K);
  K.diagonal().array() += noise_variance;
  Factorization f{jittered_cholesky(K, scale, jitter), {}};
  f.alpha = f.factor.llt.solve(targets);
  // The jitter may not move the fit by more than the noise level; with
  // noiseless targets, by more than 1e-6 relative. Conflicting noiseless
  // targets at coincident inputs end up here.
  const double misfit = (f.factor.jitter * f.alpha).cwiseAbs().maxCoeff();
  const double allowed = std::max(1e-6 * targets.cwiseAbs().maxCoeff(), std::sqrt(noise_variance));
  if (!f.alpha.allFinite() || misfit > allowed) {
    std::ostringstream msg;
    msg << "kernel matrix is numerically singular for these targets (jitter " << f.factor.jitter
        << " shifts the fit by " << misfit << ")";
    throw Error(ErrorCode::kIllConditioned, msg.str());
  }
  return f;
}

double lml_from(const Factorization& f, const Eigen::MatrixXd& targets) {
  const auto n = static_cast<double>(targets.rows());
  const double half_log_det = f.factor.llt.matrixLLT().diagonal().array().log().sum();
  double total = 0.0;
  for (Eigen::Index c = 0; c < targets.cols(); ++c)
    total += -0.5 * targets.col(c).dot(f.alpha.col(c)) - half_log_det - 0.5 * n * kLog2Pi;
  return total;
}

double lml_impl(std::span<const Pose> inputs, const Eigen::MatrixXd& targets, const KernelSpec& kernel,
                double noise_variance, double jitter) {
  return lml_from(factorize(inputs, targets, kernel, noise_variance, jitter), targets);
}

}  // namespace

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& covariance, double scale, double relative) {
  if (!covariance.allFinite()) throw Error(ErrorCode::kIllConditioned, "covariance has non-finite entries");
  if (!std::isfinite(relative) || relative < 0.0) throw_invalid("jitter must be finite and >= 0");
  const double first = relative * scale;
  const double last = std::max(1e-4, relative) * scale;
  const auto n = covariance.rows();
  JitteredCholesky out;
  double jitter = first;
  for (;;) {
    out.llt.compute(covariance + jitter * Eigen::MatrixXd::Identity(n, n));
    if (out.llt.info() == Eigen::Success && out.llt.matrixLLT().diagonal().allFinite()) {
      out.jitter = jitter;
      return out;
    }
    if (jitter >= last) break;
    jitter = jitter > 0.0 ? std::min(2.0 * jitter, last) : 1e-8 * scale;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed; final jitter tried " << jitter;
  throw Error(ErrorCode::kIllConditioned, msg.str());
}

GPPosterior::GPPosterior(std::vector<Pose> inputs, KernelSpec kernel, double noise_variance,
                         JitteredCholesky factor, Eigen::MatrixXd alpha)
    : inputs_(std::move(inputs)),
      kernel_(std::move(kernel)),
      noise_variance_(noise_variance),
      factor_(std::move(factor)),
      alpha_(std::move(alpha)) {}

GPPosterior fit(const RegressionProblem& problem) {
  Factorization f = factorize(problem.inputs, problem.targets, problem.kernel, problem.noise_variance, problem.jitter);
  return GPPosterior(problem.inputs, problem.kernel, problem.noise_variance, std::move(f.factor),
                     std::move(f.alpha));
}

Prediction predict(const GPPosterior& posterior, std::span<const Pose> query) {
  const Eigen::MatrixXd Ks = cross_covariance(posterior.kernel(), posterior.inputs(), query);
  Prediction out;
  out.mean = Ks.transpose() * posterior.alpha();
  const Eigen::MatrixXd V = posterior.llt().matrixL().solve(Ks);
  out.variance.resize(static_cast<Eigen::Index>(query.size()));
  for (std::size_t i = 0; i < query.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double prior = evaluate(posterior.kernel(), query[i], query[i]);
    out.variance[c] = std::max(0.0, prior - V.col(c).squaredNorm());
  }
  return out;
}

std::vector<Eigen::MatrixXd> sample_posterior(const GPPosterior& posterior, std::span<const Pose> query,
                                              int count, std::uint64_t seed) {
  if (count < 1) throw_invalid("sample count must be >= 1");
  const Eigen::MatrixXd Ks = cross_covariance(posterior.kernel(), posterior.inputs(), query);
  const Eigen::MatrixXd mean = Ks.transpose() * posterior.alpha();
  const Eigen::MatrixXd V = posterior.llt().matrixL().solve(Ks);
  const auto m = static_cast<Eigen::Index>(query.size());
  Eigen::MatrixXd cov = gram_matrix(posterior.kernel(), query, 0.0) - V.transpose() * V;
  cov = 0.5 * (cov + cov.transpose()).eval();
  cov.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::kIllConditioned, "predictive covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Eigen::MatrixXd z(m, mean.cols());
    for (Eigen::Index c = 0; c < z.cols(); ++c)
      for (Eigen::Index r = 0; r < m; ++r) z(r, c) = normal(rng);
    samples.push_back(mean + L * z);
  }
  return samples;
}

double log_marginal_likelihood(const RegressionProblem& problem) {
  return lml_impl(problem.inputs, problem.targets, problem.kernel, problem.noise_variance, problem.jitter);
}

HyperObjective::HyperObjective(std::span<const RegressionProblem> problems, std::vector<std::string> free)
    : problems_(problems), names_(std::move(free)) {
  if (problems_.empty()) throw_invalid("hyperparameter optimization needs at least one problem");
  const auto params = kernel_parameters(problems_.front().kernel);
  for (const auto& name : names_) {
    if (name == kNoiseVariance) continue;
    const bool known = std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.first == name; });
    if (!known) throw_invalid("unknown hyperparameter '" + name + "'");
  }
}

Eigen::VectorXd HyperObjective::initial_log_params() const {
  const RegressionProblem& first = problems_.front();
  const auto params = kernel_parameters(first.kernel);
  Eigen::VectorXd x(static_cast<Eigen::Index>(names_.size()));
  for (std::size_t i = 0; i < names_.size(); ++i) {
    double v = first.noise_variance;
    if (names_[i] != kNoiseVariance)
      v = std::find_if(params.begin(), params.end(), [&](const auto& p) { return p.first == names_[i]; })->second;
    x[static_cast<Eigen::Index>(i)] = std::log(v);
  }
  return x;
}

void HyperObjective::apply(const Eigen::VectorXd& log_params, KernelSpec& kernel, double& noise_variance) const {
  kernel = problems_.front().kernel;
  noise_variance = problems_.front().noise_variance;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    const double v = std::exp(log_params[static_cast<Eigen::Index>(i)]);
    if (names_[i] == kNoiseVariance)
      noise_variance = v;
    else
      kernel = with_parameter(std::move(kernel), names_[i], v);
  }
}

double HyperObjective::operator()(const Eigen::VectorXd& log_params) const {
  if (!log_params.allFinite()) return -std::numeric_limits<double>::infinity();
  KernelSpec kernel;
  double noise = 0.0;
  apply(log_params, kernel, noise);
  double total = 0.0;
  try {
    for (const auto& p : problems_) total += lml_impl(p.inputs, p.targets, kernel, noise, p.jitter);
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::isfinite(total) ? total : -std::numeric_limits<double>::infinity();
}

Eigen::VectorXd HyperObjective::gradient(const Eigen::VectorXd& log_params, double step) const {
  Eigen::VectorXd g(log_params.size());
  for (Eigen::Index i = 0; i < log_params.size(); ++i) {
    Eigen::VectorXd plus = log_params;
    Eigen::VectorXd minus = log_params;
    plus[i] += step;
    minus[i] -= step;
    g[i] = ((*this)(plus) - (*this)(minus)) / (2.0 * step);
  }
  return g;
}

OptimizationResult optimize_hyperparameters(std::span<const RegressionProblem> problems,
                                            const std::vector<std::string>& free, const OptimizerConfig& config) {
  const HyperObjective objective(problems, free);
  Eigen::VectorXd x = objective.initial_log_params();
  double f = objective(x);
  if (!std::isfinite(f))
    throw Error(ErrorCode::kInvalidInitialization, "log marginal likelihood is not finite at the initial hyperparameters");

  OptimizationResult result;
  result.trace.push_back(f);
  double max_move = 1.0;  // largest log-parameter change tried per iteration
  for (int iter = 0; iter < config.max_iters && x.size() > 0; ++iter) {
    const Eigen::VectorXd g = objective.gradient(x, config.fd_step);
    if (!g.allFinite()) break;
    const double gmax = g.cwiseAbs().maxCoeff();
    if (gmax < config.gradient_tolerance) break;

    double t = max_move / gmax;
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving, t *= 0.5) {
      const Eigen::VectorXd candidate = x + t * g;
      const double fc = objective(candidate);
      if (std::isfinite(fc) && fc >= f + 1e-4 * t * g.squaredNorm()) {
        x = candidate;
        f = fc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    result.trace.push_back(f);
    max_move = std::min(2.0 * t * gmax, 2.0);
  }
  objective.apply(x, result.kernel, result.noise_variance);
  return result;
}

OptimizationResult optimize_hyperparameters(const RegressionProblem& problem, const std::vector<std::string>& free,
                                            const OptimizerConfig& config) {
  return optimize_hyperparameters(std::span<const RegressionProblem>(&problem, 1), free, config);
}

std::vector<std::string> default_free_parameters(const KernelSpec& kernel) {
  std::vector<std::string> names;
  for (const auto& [name, value] : kernel_parameters(kernel))
    if (name != "orientation.variance") names.push_back(name);
  names.emplace_back(kNoiseVariance);
  return names;
}

Metrics metrics_rmse_nlpd(const Prediction& prediction, const Eigen::MatrixXd& truth, double noise_variance) {
  if (prediction.mean.rows() != truth.rows() || prediction.mean.cols() != truth.cols() ||
      prediction.variance.size() != truth.rows())
    throw_invalid("prediction and truth shapes differ");
  if (truth.size() == 0) throw_invalid("no entries to score");
  double se = 0.0;
  double nlp = 0.0;
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    const double v = prediction.variance[r] + noise_variance;
    if (!(v > 0.0)) throw_invalid("predictive variance plus noise must be positive");
    for (Eigen::Index c = 0; c < truth.cols(); ++c) {
      const double e = truth(r, c) - prediction.mean(r, c);
      se += e * e;
      nlp += 0.5 * (kLog2Pi + std::log(v)) + e * e / (2.0 * v);
    }
  }
  const auto count = static_cast<double>(truth.size());
  return {std::sqrt(se / count), nlp / count};
}

}  // namespace viewgp
