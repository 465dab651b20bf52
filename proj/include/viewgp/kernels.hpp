#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "viewgp/so3.hpp"

namespace viewgp {

// Hyperparameter sets, one per covariance family. `variance` is the magnitude
// sigma^2; lengthscales are strictly positive.

struct TranslationParams {
  double variance = 1.0;
  double lengthscale = 1.0;
};

/// Standard periodic kernel on one Euler component (axis 0, 1 or 2 of the
/// Rz*Ry*Rx angles) when evaluated on poses.
struct Periodic1DParams {
  double variance = 1.0;
  double lengthscale = 1.0;
  int axis = 2;
};

struct SeparableEulerParams {
  double variance = 1.0;
  std::array<double, 3> lengthscales{1.0, 1.0, 1.0};
};

struct QuaternionParams {
  double variance = 1.0;
  double lengthscale = 1.0;
};

struct GeodesicParams {
  double variance = 1.0;
  double lengthscale = 1.0;
};

struct ViewIsoParams {
  double variance = 1.0;
  double lengthscale = 1.0;
};

/// Anisotropic view kernel with Lambda = diag(lx^-2, ly^-2, lz^-2).
struct ViewAnisoParams {
  double variance = 1.0;
  std::array<double, 3> lengthscales{1.0, 1.0, 1.0};
};

using OrientationSpec = std::variant<Periodic1DParams, SeparableEulerParams, QuaternionParams,
                                     GeodesicParams, ViewIsoParams, ViewAnisoParams>;

struct PoseProductParams {
  TranslationParams translation;
  OrientationSpec orientation = ViewIsoParams{};
};

/// Linear object kernel times anisotropic view kernel; inputs are
/// (feature vector, rotation) pairs rather than poses.
struct ObjectViewParams {
  double variance = 1.0;
  std::array<double, 3> lengthscales{1.0, 1.0, 1.0};
};

struct LinearExtrinsicsParams {
  double variance = 1.0;
};

using KernelSpec =
    std::variant<TranslationParams, Periodic1DParams, SeparableEulerParams, QuaternionParams,
                 GeodesicParams, ViewIsoParams, ViewAnisoParams, PoseProductParams, ObjectViewParams,
                 LinearExtrinsicsParams>;

struct ObjectViewInput {
  Eigen::VectorXd features;
  RotationMatrix R;
};

/// Lambda = diag(l^-2) for per-axis lengthscales.
Eigen::Vector3d precision_diagonal(const std::array<double, 3>& lengthscales);

double k_translation(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const TranslationParams& h);
double k_periodic_1d(double theta1, double theta2, double lengthscale);
double k_separable_euler(const EulerAngles& a, const EulerAngles& b,
                         const std::array<double, 3>& lengthscales);
double k_quat(const UnitQuaternion& q1, const UnitQuaternion& q2, double variance, double lengthscale);
double k_geodesic(const RotationMatrix& R1, const RotationMatrix& R2, double variance, double lengthscale);
double k_view_iso(const RotationMatrix& R1, const RotationMatrix& R2, double variance, double lengthscale);
/// `precision` holds the diagonal of Lambda.
double k_view_aniso(const RotationMatrix& R1, const RotationMatrix& R2, double variance,
                    const Eigen::Vector3d& precision);
double k_pose(const Pose& P1, const Pose& P2, const PoseProductParams& h);
double k_object_view(std::span<const double> x1, std::span<const double> x2, const RotationMatrix& R1,
                     const RotationMatrix& R2, const Eigen::Vector3d& precision, double variance);
double k_linear_extrinsics(const Pose& P1, const Pose& P2, double variance);

double evaluate_orientation(const OrientationSpec& spec, const RotationMatrix& R1, const RotationMatrix& R2);
/// Any pose family. Throws invalid-input for ObjectView, which is not a pose kernel.
double evaluate(const KernelSpec& spec, const Pose& P1, const Pose& P2);
double evaluate(const ObjectViewParams& h, const ObjectViewInput& a, const ObjectViewInput& b);

/// Symmetric Gram matrix: upper triangle evaluated, mirrored, jitter on the diagonal.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, std::span<const Pose> inputs, double jitter = 0.0);
Eigen::MatrixXd gram_matrix(const ObjectViewParams& h, std::span<const ObjectViewInput> inputs,
                            double jitter = 0.0);
/// K(a_i, b_j), |a| x |b|.
Eigen::MatrixXd cross_covariance(const KernelSpec& spec, std::span<const Pose> a, std::span<const Pose> b);

/// "translation", "view_iso", ... as used in the kernel JSON documents.
std::string family_name(const KernelSpec& spec);
std::string family_name(const OrientationSpec& spec);
/// family_name, with the orientation member appended for products ("pose_product:view_iso").
std::string display_name(const KernelSpec& spec);

/// Throws invalid-input unless every magnitude and lengthscale is finite and positive.
void validate(const KernelSpec& spec);

/// Positive continuous hyperparameters by name. Product members are prefixed
/// "translation." and "orientation.".
std::vector<std::pair<std::string, double>> kernel_parameters(const KernelSpec& spec);
/// Copy of `spec` with one named parameter replaced. Unknown names throw invalid-input.
KernelSpec with_parameter(KernelSpec spec, const std::string& name, double value);

}  // namespace viewgp
