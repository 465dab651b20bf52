#include "viewgp/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <type_traits>
#include <random>

#include "parallel.hpp"
#include "viewgp/error.hpp"

namespace viewgp {

namespace {

struct TrackSplit {
  RegressionProblem train;
  std::vector<Pose> all_poses;
  std::vector<Pose> test_poses;
  Eigen::MatrixXd test_truth;  // k x 2
  Eigen::RowVector2d mean;
};

std::vector<TrackSplit> split_tracks(const TrackDataset& dataset, std::size_t& skipped) {
  std::vector<TrackSplit> splits;
  skipped = 0;
  for (const auto& track : dataset.tracks) {
    TrackSplit s;
    std::vector<Eigen::RowVector2d> train_uv, test_uv;
    for (const auto& pt : track.points) {
      s.all_poses.push_back(pt.pose);
      if (pt.test) {
        s.test_poses.push_back(pt.pose);
        test_uv.emplace_back(pt.u, pt.v);
      } else {
        s.train.inputs.push_back(pt.pose);
        train_uv.emplace_back(pt.u, pt.v);
      }
    }
    if (test_uv.empty() || train_uv.empty()) {
      ++skipped;
      continue;
    }
    s.train.targets.resize(static_cast<Eigen::Index>(train_uv.size()), 2);
    for (std::size_t i = 0; i < train_uv.size(); ++i) s.train.targets.row(static_cast<Eigen::Index>(i)) = train_uv[i];
    s.mean = s.train.targets.colwise().mean();
    s.train.targets.rowwise() -= s.mean;
    s.test_truth.resize(static_cast<Eigen::Index>(test_uv.size()), 2);
    for (std::size_t i = 0; i < test_uv.size(); ++i) s.test_truth.row(static_cast<Eigen::Index>(i)) = test_uv[i];
    splits.push_back(std::move(s));
  }
  return splits;
}

struct Hyper {
  KernelSpec kernel;
  double noise_variance;
};

Hyper learn(const std::vector<TrackSplit>& splits, const KernelSpec& kernel, double noise,
            const TrackExperimentConfig& config) {
  std::vector<RegressionProblem> problems;
  problems.reserve(splits.size());
  for (const auto& s : splits) problems.push_back({s.train.inputs, s.train.targets, noise, kernel, config.jitter});
  const auto result = optimize_hyperparameters(problems, default_free_parameters(kernel), config.optimizer);
  return {result.kernel, result.noise_variance};
}

bool is_view_product(const KernelSpec& k) {
  const auto* p = std::get_if<PoseProductParams>(&k);
  return p && std::holds_alternative<ViewIsoParams>(p->orientation);
}

void set_orientation_scale(OrientationSpec& o, double variance, double lengthscale) {
  std::visit(
      [&](auto& h) {
        h.variance = variance;
        if constexpr (requires { h.lengthscales; })
          h.lengthscales = {lengthscale, lengthscale, lengthscale};
        else
          h.lengthscale = lengthscale;
      },
      o);
}

std::optional<OrientationSpec> as_orientation(const KernelSpec& k) {
  return std::visit(
      [](const auto& h) -> std::optional<OrientationSpec> {
        if constexpr (std::is_constructible_v<OrientationSpec, decltype(h)>)
          return OrientationSpec{h};
        else
          return std::nullopt;
      },
      k);
}

KernelSpec as_kernel(const OrientationSpec& o) {
  return std::visit([](const auto& h) -> KernelSpec { return h; }, o);
}

// Reuse the magnitude and lengthscales learned on the translation x view_iso
// product; orientation lengthscales all take the learned view lengthscale.
KernelSpec transfer_to(const KernelSpec& target, const PoseProductParams& learned) {
  const auto& view = std::get<ViewIsoParams>(learned.orientation);
  const double total_variance = learned.translation.variance * view.variance;
  if (std::holds_alternative<TranslationParams>(target))
    return TranslationParams{total_variance, learned.translation.lengthscale};
  if (const auto* p = std::get_if<PoseProductParams>(&target)) {
    PoseProductParams out{learned.translation, p->orientation};
    set_orientation_scale(out.orientation, view.variance, view.lengthscale);
    return out;
  }
  if (auto o = as_orientation(target)) {
    set_orientation_scale(*o, total_variance, view.lengthscale);
    return as_kernel(*o);
  }
  return target;
}

double min_eigenvalue(const Eigen::MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct TrackOutcome {
  Eigen::MatrixXd mean;
  Eigen::VectorXd variance;
  double lml = 0.0;
  double min_eig = 0.0;
};

KernelReport evaluate_kernel(const std::vector<TrackSplit>& splits, const std::string& name, const Hyper& h,
                             double jitter) {
  std::vector<TrackOutcome> outcomes(splits.size());
  detail::parallel_for(splits.size(), [&](std::size_t i) {
    const TrackSplit& s = splits[i];
    const RegressionProblem problem{s.train.inputs, s.train.targets, h.noise_variance, h.kernel, jitter};
    const GPPosterior post = fit(problem);
    Prediction pred = predict(post, s.test_poses);
    pred.mean.rowwise() += s.mean;
    outcomes[i] = {std::move(pred.mean), std::move(pred.variance), log_marginal_likelihood(problem),
                   min_eigenvalue(gram_matrix(h.kernel, s.all_poses, 0.0))};
  });

  Eigen::Index rows = 0;
  for (const auto& s : splits) rows += s.test_truth.rows();
  Prediction all;
  all.mean.resize(rows, 2);
  all.variance.resize(rows);
  Eigen::MatrixXd truth(rows, 2);
  KernelReport report;
  report.name = name;
  report.kernel = h.kernel;
  report.noise_variance = h.noise_variance;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    const auto k = splits[i].test_truth.rows();
    all.mean.middleRows(r, k) = outcomes[i].mean;
    all.variance.segment(r, k) = outcomes[i].variance;
    truth.middleRows(r, k) = splits[i].test_truth;
    report.log_marginal_likelihood += outcomes[i].lml;
    report.min_eigenvalue = std::min(report.min_eigenvalue, outcomes[i].min_eig);
    r += k;
  }
  const Metrics m = metrics_rmse_nlpd(all, truth, h.noise_variance);
  report.rmse = m.rmse;
  report.nlpd = m.nlpd;
  report.test_values = static_cast<std::size_t>(truth.size());
  return report;
}

}  // namespace

ExperimentReport run_track_experiment(const TrackDataset& dataset, const TrackExperimentConfig& config) {
  if (dataset.tracks.empty()) throw Error(ErrorCode::kEmptyResult, "track dataset is empty");
  if (config.kernels.empty()) throw_invalid("no kernels configured");
  for (const auto& k : config.kernels) {
    if (std::holds_alternative<ObjectViewParams>(k)) throw_invalid("object_view is not a pose kernel");
    validate(k);
  }

  ExperimentReport report;
  report.hyper = config.hyper;
  report.initial_noise_variance = config.noise_variance;
  report.seed = config.seed;
  std::vector<TrackSplit> splits = split_tracks(dataset, report.tracks_skipped);
  report.tracks_used = splits.size();
  if (splits.empty()) throw Error(ErrorCode::kEmptyResult, "no track has both training and test points");

  std::optional<Hyper> reference;
  if (config.hyper == HyperMode::kTransfer) {
    const auto it = std::find_if(config.kernels.begin(), config.kernels.end(), is_view_product);
    if (it == config.kernels.end())
      throw_invalid("transfer mode needs a pose_product kernel with a view_iso orientation");
    reference = learn(splits, *it, config.noise_variance, config);
  }

  std::vector<std::string> used_names;
  for (const auto& kernel : config.kernels) {
    Hyper h{kernel, config.noise_variance};
    switch (config.hyper) {
      case HyperMode::kFixed:
        break;
      case HyperMode::kIndependent:
        h = learn(splits, kernel, config.noise_variance, config);
        break;
      case HyperMode::kTransfer:
        if (is_view_product(kernel)) {
          h = *reference;
        } else if (std::holds_alternative<LinearExtrinsicsParams>(kernel)) {
          h = learn(splits, kernel, config.noise_variance, config);
        } else {
          h = {transfer_to(kernel, std::get<PoseProductParams>(reference->kernel)), reference->noise_variance};
        }
        break;
    }
    std::string name = display_name(kernel);
    const auto dup = std::count(used_names.begin(), used_names.end(), name);
    used_names.push_back(name);
    if (dup > 0) name += "#" + std::to_string(dup + 1);
    report.kernels.push_back(evaluate_kernel(splits, name, h, config.jitter));
  }
  return report;
}

std::string hyper_mode_name(HyperMode mode) {
  switch (mode) {
    case HyperMode::kFixed: return "fixed";
    case HyperMode::kIndependent: return "independent";
    case HyperMode::kTransfer: return "transfer";
  }
  return "fixed";
}

HyperMode parse_hyper_mode(const std::string& name) {
  if (name == "fixed") return HyperMode::kFixed;
  if (name == "independent") return HyperMode::kIndependent;
  if (name == "transfer") return HyperMode::kTransfer;
  throw_invalid("unknown hyperparameter mode '" + name + "'");
}

LatentSequence make_latent_sequence(std::span<const Pose> poses, const LatentConfig& config) {
  if (config.dim < 1) throw_invalid("latent dimension must be >= 1");
  if (poses.empty()) throw_invalid("latent sequence needs at least one pose");
  if (!(config.noise_variance >= 0.0)) throw_invalid("noise variance must be >= 0");
  const KernelSpec prior = ViewIsoParams{config.variance, config.lengthscale};
  validate(prior);

  // Symmetric square root of the prior covariance; eigenvalues below zero
  // are round-off and clamped.
  const Eigen::MatrixXd K = gram_matrix(prior, poses, 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::kIllConditioned, "prior eigendecomposition failed");
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  const auto n = static_cast<Eigen::Index>(poses.size());
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, config.dim);
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = normal(rng);

  LatentSequence seq;
  seq.poses.assign(poses.begin(), poses.end());
  seq.truth = root * z;
  seq.noise_variance = config.noise_variance;
  seq.codes = seq.truth;
  const double sd = std::sqrt(config.noise_variance);
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < n; ++r) {
      const double e = normal(rng);
      if (sd > 0.0) seq.codes(r, c) += sd * e;
    }
  return seq;
}

InterpResult run_interp_experiment(const LatentSequence& seq, InterpMode mode, const KernelSpec& kernel,
                                   double noise_variance, double jitter) {
  const auto n = static_cast<Eigen::Index>(seq.poses.size());
  if (seq.codes.rows() != n || seq.truth.rows() != n || seq.codes.cols() != seq.truth.cols())
    throw_invalid("code rows must match the pose count");
  if (seq.codes.cols() < 1) throw_invalid("codes need at least one dimension");
  if (mode != InterpMode::kAllFrames && n < 3) throw_invalid("endpoint interpolation needs at least 3 frames");
  if (n < 1) throw_invalid("empty latent sequence");

  InterpResult out;
  out.posterior_std = Eigen::VectorXd::Zero(n);
  if (mode == InterpMode::kLinearBaseline) {
    out.mean.resize(n, seq.codes.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = static_cast<double>(j) / static_cast<double>(n - 1);
      out.mean.row(j) = (1.0 - w) * seq.codes.row(0) + w * seq.codes.row(n - 1);
    }
  } else {
    std::vector<Eigen::Index> idx;
    if (mode == InterpMode::kEndpointsOnly) {
      idx = {0, n - 1};
    } else {
      for (Eigen::Index j = 0; j < n; ++j) idx.push_back(j);
    }
    RegressionProblem problem;
    problem.kernel = kernel;
    problem.noise_variance = noise_variance;
    problem.jitter = jitter;
    problem.targets.resize(static_cast<Eigen::Index>(idx.size()), seq.codes.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      problem.inputs.push_back(seq.poses[static_cast<std::size_t>(idx[i])]);
      problem.targets.row(static_cast<Eigen::Index>(i)) = seq.codes.row(idx[i]);
    }
    const Eigen::RowVectorXd center = problem.targets.colwise().mean();
    problem.targets.rowwise() -= center;
    const Prediction pred = predict(fit(problem), seq.poses);
    out.mean = pred.mean.rowwise() + center;
    out.posterior_std = pred.variance.cwiseSqrt();
  }
  out.frame_mse = (out.mean - seq.truth).array().square().rowwise().mean().matrix();
  out.mean_mse = out.frame_mse.mean();
  return out;
}

Trajectory sweep_trajectory(int frames) {
  if (frames < 3) throw_invalid("a sweep needs at least 3 frames");
  const UnitQuaternion q0(1.0, 0.0, 0.0, 0.0);
  const UnitQuaternion q1 = quat_from_axis_angle(Eigen::Vector3d(0.2, 0.3, 1.0), 1.2);
  const UnitQuaternion q2 = q1 * quat_from_axis_angle(Eigen::Vector3d(1.0, 0.3, 0.2), 0.45);
  TrajectoryConfig config;
  for (int i = 0; i < 3; ++i) {
    Waypoint w;
    w.time = i;
    w.pose.R = quat_to_matrix(i == 0 ? q0 : i == 1 ? q1 : q2);
    config.waypoints.push_back(w);
  }
  const int first = frames / 2;
  config.frames_per_segment = {first, frames - 1 - first};
  return make_trajectory(config);
}

std::string interp_mode_name(InterpMode mode) {
  switch (mode) {
    case InterpMode::kEndpointsOnly: return "endpoints";
    case InterpMode::kAllFrames: return "all-frames";
    case InterpMode::kLinearBaseline: return "linear";
  }
  return "endpoints";
}

InterpMode parse_interp_mode(const std::string& name) {
  if (name == "endpoints" || name == "endpoints-only") return InterpMode::kEndpointsOnly;
  if (name == "all-frames" || name == "all") return InterpMode::kAllFrames;
  if (name == "linear" || name == "linear-baseline") return InterpMode::kLinearBaseline;
  throw_invalid("unknown interpolation mode '" + name + "'");
}

RotationMatrix figure_rotation(double theta1, double theta2) {
  return rot_axis(Axis::kY, theta2) * rot_axis(Axis::kX, theta1);
}

double figure_distance(DistanceMeasure measure, double a1, double a2, double b1, double b2) {
  switch (measure) {
    case DistanceMeasure::kGeodesic:
      return geodesic_distance(figure_rotation(a1, a2), figure_rotation(b1, b2));
    case DistanceMeasure::kView:
      return view_distance(figure_rotation(a1, a2), figure_rotation(b1, b2));
    case DistanceMeasure::kSeparable: {
      const double s1 = std::sin(0.5 * (a1 - b1));
      const double s2 = std::sin(0.5 * (a2 - b2));
      return 2.0 * std::sqrt(s1 * s1 + s2 * s2);
    }
    case DistanceMeasure::kQuaternion: {
      // Half-angle composition, no sign canonicalization.
      const Eigen::Vector3d ex = Eigen::Vector3d::UnitX();
      const Eigen::Vector3d ey = Eigen::Vector3d::UnitY();
      const UnitQuaternion qa = quat_from_axis_angle(ey, a2) * quat_from_axis_angle(ex, a1);
      const UnitQuaternion qb = quat_from_axis_angle(ey, b2) * quat_from_axis_angle(ex, b1);
      return quat_distance(qa, qb);
    }
  }
  return 0.0;
}

FigureSet emit_distance_figures(const FigureConfig& config) {
  const int N = config.resolution;
  if (N < 2) throw_invalid("figure grid needs at least 2 points per axis");
  if (!(config.lengthscale > 0.0) || !std::isfinite(config.lengthscale)) throw_invalid("lengthscale must be > 0");
  constexpr double pi = std::numbers::pi;
  FigureSet set;
  set.angles.resize(N);
  for (int i = 0; i < N; ++i) set.angles[i] = -pi + 2.0 * pi * i / (N - 1);

  const double inv2l2 = 1.0 / (2.0 * config.lengthscale * config.lengthscale);
  auto cov = [&](double d) { return std::exp(-d * d * inv2l2); };
  const int M = N * N;
  for (DistanceMeasure measure : config.measures) {
    MeasureFigure fig;
    fig.measure = measure;
    fig.distance.resize(M, M);
    for (int a = 0; a < M; ++a) {
      const double a1 = set.angles[a / N], a2 = set.angles[a % N];
      fig.distance(a, a) = 0.0;
      for (int b = a + 1; b < M; ++b) {
        const double d = figure_distance(measure, a1, a2, set.angles[b / N], set.angles[b % N]);
        fig.distance(a, b) = d;
        fig.distance(b, a) = d;
      }
    }
    fig.covariance = fig.distance.unaryExpr(cov);
    fig.diagonal_slice.resize(N);
    fig.theta2_zero_slice.resize(N);
    for (int i = 0; i < N; ++i) {
      const double t = set.angles[i];
      fig.diagonal_slice[i] = figure_distance(measure, 0.0, 0.0, t, t);
      fig.theta2_zero_slice[i] = figure_distance(measure, 0.0, 0.0, t, 0.0);
    }
    fig.diagonal_covariance_slice = fig.diagonal_slice.unaryExpr(cov);
    fig.theta2_zero_covariance_slice = fig.theta2_zero_slice.unaryExpr(cov);
    set.figures.push_back(std::move(fig));
  }
  return set;
}

std::string measure_name(DistanceMeasure measure) {
  switch (measure) {
    case DistanceMeasure::kGeodesic: return "geodesic";
    case DistanceMeasure::kQuaternion: return "quaternion";
    case DistanceMeasure::kSeparable: return "separable";
    case DistanceMeasure::kView: return "view";
  }
  return "view";
}

DistanceMeasure parse_measure(const std::string& name) {
  if (name == "geodesic") return DistanceMeasure::kGeodesic;
  if (name == "quaternion") return DistanceMeasure::kQuaternion;
  if (name == "separable") return DistanceMeasure::kSeparable;
  if (name == "view") return DistanceMeasure::kView;
  throw_invalid("unknown distance measure '" + name + "'");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> trajectory_covariances(std::span<const Pose> poses,
                                                                   double translation_lengthscale,
                                                                   double view_lengthscale) {
  if (poses.empty()) throw_invalid("trajectory is empty");
  return {gram_matrix(TranslationParams{1.0, translation_lengthscale}, poses, 0.0),
          gram_matrix(ViewIsoParams{1.0, view_lengthscale}, poses, 0.0)};
}

}  // namespace viewgp
