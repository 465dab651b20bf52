#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace viewgp {

enum class Axis { kX = 0, kY = 1, kZ = 2 };

/// A 3x3 proper rotation. Construction through from_matrix() validates
/// orthonormality and det = +1 to 1e-9.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Eigen::Matrix3d::Identity()) {}

  static RotationMatrix from_matrix(const Eigen::Matrix3d& m);
  static RotationMatrix identity() { return {}; }
  /// No validation; for matrices that are rotations by construction.
  static RotationMatrix from_trusted(const Eigen::Matrix3d& m) { return RotationMatrix(m); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  RotationMatrix operator*(const RotationMatrix& other) const;
  RotationMatrix transpose() const;

  friend bool operator==(const RotationMatrix& a, const RotationMatrix& b) { return a.m_ == b.m_; }

 private:
  explicit RotationMatrix(const Eigen::Matrix3d& m) : m_(m) {}

  Eigen::Matrix3d m_;
};

/// Unit quaternion stored as (w, x, y, z); renormalized on construction.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  UnitQuaternion(double w, double x, double y, double z);

  double w() const { return q_[0]; }
  double x() const { return q_[1]; }
  double y() const { return q_[2]; }
  double z() const { return q_[3]; }
  const Eigen::Vector4d& coeffs() const { return q_; }

  UnitQuaternion operator-() const;
  /// Hamilton product.
  UnitQuaternion operator*(const UnitQuaternion& rhs) const;

  friend bool operator==(const UnitQuaternion& a, const UnitQuaternion& b) { return a.q_ == b.q_; }

 private:
  Eigen::Vector4d q_{1.0, 0.0, 0.0, 0.0};
};

/// Euler angles for R = Rz(t3) * Ry(t2) * Rx(t1). Components are wrapped to (-pi, pi].
class EulerAngles {
 public:
  EulerAngles() = default;
  EulerAngles(double t1, double t2, double t3);

  double operator[](int i) const { return t_[i]; }
  const Eigen::Vector3d& vector() const { return t_; }

 private:
  Eigen::Vector3d t_ = Eigen::Vector3d::Zero();
};

/// Camera pose: position of the camera centre and orientation in world coordinates.
struct Pose {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  RotationMatrix R;
};

double wrap_angle(double angle);

RotationMatrix rot_axis(Axis axis, double angle);
RotationMatrix euler_to_matrix(const EulerAngles& angles);
/// Inverse of euler_to_matrix; unique away from |t2| = pi/2.
EulerAngles matrix_to_euler(const RotationMatrix& R);

/// Canonicalized so that w >= 0 (ties broken by the first nonzero component >= 0).
UnitQuaternion matrix_to_quat(const RotationMatrix& R);
RotationMatrix quat_to_matrix(const UnitQuaternion& q);
/// Axis-angle quaternion (cos(a/2), sin(a/2) * axis). Not canonicalized.
UnitQuaternion quat_from_axis_angle(const Eigen::Vector3d& axis, double angle);
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t);

/// tr(R1^T R2).
double trace_product(const RotationMatrix& R1, const RotationMatrix& R2);
/// tr(I - R1^T R2), evaluated as 0.5 * ||R1 - R2||_F^2 and clamped to [0, 4].
double trace_deficit(const RotationMatrix& R1, const RotationMatrix& R2);

/// arccos((tr(R1^T R2) - 1) / 2), in [0, pi].
double geodesic_distance(const RotationMatrix& R1, const RotationMatrix& R2);
/// sqrt(tr(I - R1^T R2)), in [0, 2].
double view_distance(const RotationMatrix& R1, const RotationMatrix& R2);
/// 2 * ||q1 - q2||. No sign canonicalization: q and -q are at distance 4.
double quat_distance(const UnitQuaternion& q1, const UnitQuaternion& q2);

/// Uniform on SO(3) from a normalized 4-d Gaussian.
RotationMatrix random_rotation(std::mt19937_64& rng);
RotationMatrix random_rotation(std::uint64_t seed);

}  // namespace viewgp
