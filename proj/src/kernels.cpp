#include "viewgp/kernels.hpp"

#include <cmath>
#include <type_traits>

#include "viewgp/error.hpp"

namespace viewgp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double warped_rbf(double squared_distance, double variance, double lengthscale) {
  return variance * std::exp(-squared_distance / (2.0 * lengthscale * lengthscale));
}

double periodic_factor(double delta, double lengthscale) {
  const double s = std::sin(0.5 * delta);
  return std::exp(-2.0 * s * s / (lengthscale * lengthscale));
}

// Visits every continuous hyperparameter as (name, reference).
template <class F>
void visit_orientation_params(OrientationSpec& spec, const std::string& prefix, F&& f) {
  std::visit(Overloaded{
                 [&](Periodic1DParams& h) {
                   f(prefix + "variance", h.variance);
                   f(prefix + "lengthscale", h.lengthscale);
                 },
                 [&](SeparableEulerParams& h) {
                   f(prefix + "variance", h.variance);
                   f(prefix + "lengthscale_1", h.lengthscales[0]);
                   f(prefix + "lengthscale_2", h.lengthscales[1]);
                   f(prefix + "lengthscale_3", h.lengthscales[2]);
                 },
                 [&](ViewAnisoParams& h) {
                   f(prefix + "variance", h.variance);
                   f(prefix + "lengthscale_x", h.lengthscales[0]);
                   f(prefix + "lengthscale_y", h.lengthscales[1]);
                   f(prefix + "lengthscale_z", h.lengthscales[2]);
                 },
                 [&](auto& h) {
                   f(prefix + "variance", h.variance);
                   f(prefix + "lengthscale", h.lengthscale);
                 },
             },
             spec);
}

template <class F>
void visit_params(KernelSpec& spec, F&& f) {
  std::visit(Overloaded{
                 [&](TranslationParams& h) {
                   f("variance", h.variance);
                   f("lengthscale", h.lengthscale);
                 },
                 [&](PoseProductParams& h) {
                   f("translation.variance", h.translation.variance);
                   f("translation.lengthscale", h.translation.lengthscale);
                   visit_orientation_params(h.orientation, "orientation.", f);
                 },
                 [&](ObjectViewParams& h) {
                   f("variance", h.variance);
                   f("lengthscale_x", h.lengthscales[0]);
                   f("lengthscale_y", h.lengthscales[1]);
                   f("lengthscale_z", h.lengthscales[2]);
                 },
                 [&](LinearExtrinsicsParams& h) { f("variance", h.variance); },
                 [&](auto& h) {
                   OrientationSpec o = h;
                   visit_orientation_params(o, "", f);
                   h = std::get<std::decay_t<decltype(h)>>(o);
                 },
             },
             spec);
}

}  // namespace

Eigen::Vector3d precision_diagonal(const std::array<double, 3>& lengthscales) {
  return {1.0 / (lengthscales[0] * lengthscales[0]), 1.0 / (lengthscales[1] * lengthscales[1]),
          1.0 / (lengthscales[2] * lengthscales[2])};
}

double k_translation(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const TranslationParams& h) {
  return warped_rbf((p1 - p2).squaredNorm(), h.variance, h.lengthscale);
}

double k_periodic_1d(double theta1, double theta2, double lengthscale) {
  return periodic_factor(theta1 - theta2, lengthscale);
}

double k_separable_euler(const EulerAngles& a, const EulerAngles& b,
                         const std::array<double, 3>& lengthscales) {
  double k = 1.0;
  for (int j = 0; j < 3; ++j) k *= periodic_factor(a[j] - b[j], lengthscales[j]);
  return k;
}

double k_quat(const UnitQuaternion& q1, const UnitQuaternion& q2, double variance, double lengthscale) {
  const double d = quat_distance(q1, q2);
  return warped_rbf(d * d, variance, lengthscale);
}

double k_geodesic(const RotationMatrix& R1, const RotationMatrix& R2, double variance, double lengthscale) {
  const double d = geodesic_distance(R1, R2);
  return warped_rbf(d * d, variance, lengthscale);
}

double k_view_iso(const RotationMatrix& R1, const RotationMatrix& R2, double variance, double lengthscale) {
  return warped_rbf(trace_deficit(R1, R2), variance, lengthscale);
}

double k_view_aniso(const RotationMatrix& R1, const RotationMatrix& R2, double variance,
                    const Eigen::Vector3d& precision) {
  // tr(L - R1^T L R2) = 0.5 * sum_i L_ii * ||row_i(R1) - row_i(R2)||^2.
  const Eigen::Matrix3d diff = R1.matrix() - R2.matrix();
  const double t = 0.5 * precision.dot(diff.rowwise().squaredNorm());
  return variance * std::exp(-0.5 * std::max(0.0, t));
}

double k_pose(const Pose& P1, const Pose& P2, const PoseProductParams& h) {
  return k_translation(P1.p, P2.p, h.translation) * evaluate_orientation(h.orientation, P1.R, P2.R);
}

double k_object_view(std::span<const double> x1, std::span<const double> x2, const RotationMatrix& R1,
                     const RotationMatrix& R2, const Eigen::Vector3d& precision, double variance) {
  if (x1.size() != x2.size()) throw_invalid("object feature vectors differ in dimension");
  double dot = 0.0;
  for (std::size_t i = 0; i < x1.size(); ++i) dot += x1[i] * x2[i];
  return dot * k_view_aniso(R1, R2, 1.0, precision) * variance;
}

double k_linear_extrinsics(const Pose& P1, const Pose& P2, double variance) {
  return variance * (P1.p.dot(P2.p) + trace_product(P1.R, P2.R));
}

double evaluate_orientation(const OrientationSpec& spec, const RotationMatrix& R1, const RotationMatrix& R2) {
  return std::visit(
      Overloaded{
          [&](const Periodic1DParams& h) {
            const EulerAngles a = matrix_to_euler(R1);
            const EulerAngles b = matrix_to_euler(R2);
            return h.variance * k_periodic_1d(a[h.axis], b[h.axis], h.lengthscale);
          },
          [&](const SeparableEulerParams& h) {
            return h.variance * k_separable_euler(matrix_to_euler(R1), matrix_to_euler(R2), h.lengthscales);
          },
          [&](const QuaternionParams& h) {
            return k_quat(matrix_to_quat(R1), matrix_to_quat(R2), h.variance, h.lengthscale);
          },
          [&](const GeodesicParams& h) { return k_geodesic(R1, R2, h.variance, h.lengthscale); },
          [&](const ViewIsoParams& h) { return k_view_iso(R1, R2, h.variance, h.lengthscale); },
          [&](const ViewAnisoParams& h) {
            return k_view_aniso(R1, R2, h.variance, precision_diagonal(h.lengthscales));
          },
      },
      spec);
}

double evaluate(const KernelSpec& spec, const Pose& P1, const Pose& P2) {
  return std::visit(
      Overloaded{
          [&](const TranslationParams& h) { return k_translation(P1.p, P2.p, h); },
          [&](const PoseProductParams& h) { return k_pose(P1, P2, h); },
          [&](const LinearExtrinsicsParams& h) { return k_linear_extrinsics(P1, P2, h.variance); },
          [&](const ObjectViewParams&) -> double {
            throw_invalid("object_view kernel takes (features, rotation) inputs, not poses");
          },
          [&](const auto& h) { return evaluate_orientation(OrientationSpec{h}, P1.R, P2.R); },
      },
      spec);
}

double evaluate(const ObjectViewParams& h, const ObjectViewInput& a, const ObjectViewInput& b) {
  return k_object_view(std::span<const double>(a.features.data(), a.features.size()),
                       std::span<const double>(b.features.data(), b.features.size()), a.R, b.R,
                       precision_diagonal(h.lengthscales), h.variance);
}

namespace {

template <class Input, class Eval>
Eigen::MatrixXd symmetric_gram(std::span<const Input> inputs, double jitter, Eval&& eval) {
  if (!(jitter >= 0.0)) throw_invalid("jitter must be non-negative");
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double k = eval(inputs[i], inputs[j]);
      K(i, j) = k;
      K(j, i) = k;
    }
    K(i, i) += jitter;
  }
  return K;
}

}  // namespace

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, std::span<const Pose> inputs, double jitter) {
  return symmetric_gram(inputs, jitter, [&](const Pose& a, const Pose& b) { return evaluate(spec, a, b); });
}

Eigen::MatrixXd gram_matrix(const ObjectViewParams& h, std::span<const ObjectViewInput> inputs,
                            double jitter) {
  return symmetric_gram(inputs, jitter,
                        [&](const ObjectViewInput& a, const ObjectViewInput& b) { return evaluate(h, a, b); });
}

Eigen::MatrixXd cross_covariance(const KernelSpec& spec, std::span<const Pose> a, std::span<const Pose> b) {
  Eigen::MatrixXd K(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = evaluate(spec, a[i], b[j]);
  return K;
}

std::string family_name(const OrientationSpec& spec) {
  return std::visit(Overloaded{
                        [](const Periodic1DParams&) { return std::string("periodic1d"); },
                        [](const SeparableEulerParams&) { return std::string("separable_euler"); },
                        [](const QuaternionParams&) { return std::string("quaternion"); },
                        [](const GeodesicParams&) { return std::string("geodesic"); },
                        [](const ViewIsoParams&) { return std::string("view_iso"); },
                        [](const ViewAnisoParams&) { return std::string("view_aniso"); },
                    },
                    spec);
}

std::string family_name(const KernelSpec& spec) {
  return std::visit(Overloaded{
                        [](const TranslationParams&) { return std::string("translation"); },
                        [](const PoseProductParams&) { return std::string("pose_product"); },
                        [](const ObjectViewParams&) { return std::string("object_view"); },
                        [](const LinearExtrinsicsParams&) { return std::string("linear_extrinsics"); },
                        [](const auto& h) { return family_name(OrientationSpec{h}); },
                    },
                    spec);
}

std::string display_name(const KernelSpec& spec) {
  if (const auto* p = std::get_if<PoseProductParams>(&spec)) return "pose_product:" + family_name(p->orientation);
  return family_name(spec);
}

void validate(const KernelSpec& spec) {
  KernelSpec copy = spec;
  visit_params(copy, [](const std::string& name, double& v) {
    if (!std::isfinite(v) || v <= 0.0) throw_invalid("kernel parameter '" + name + "' must be finite and > 0");
  });
  if (const auto* h = std::get_if<Periodic1DParams>(&spec); h && (h->axis < 0 || h->axis > 2))
    throw_invalid("periodic1d axis must be 0, 1 or 2");
  if (const auto* p = std::get_if<PoseProductParams>(&spec)) {
    if (const auto* h = std::get_if<Periodic1DParams>(&p->orientation); h && (h->axis < 0 || h->axis > 2))
      throw_invalid("periodic1d axis must be 0, 1 or 2");
  }
}

std::vector<std::pair<std::string, double>> kernel_parameters(const KernelSpec& spec) {
  std::vector<std::pair<std::string, double>> out;
  KernelSpec copy = spec;
  visit_params(copy, [&](const std::string& name, double& v) { out.emplace_back(name, v); });
  return out;
}

KernelSpec with_parameter(KernelSpec spec, const std::string& name, double value) {
  bool found = false;
  visit_params(spec, [&](const std::string& n, double& v) {
    if (n == name) {
      v = value;
      found = true;
    }
  });
  if (!found) throw_invalid("kernel " + display_name(spec) + " has no parameter '" + name + "'");
  return spec;
}

}  // namespace viewgp
