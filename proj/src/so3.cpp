#include "viewgp/so3.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "viewgp/error.hpp"

namespace viewgp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRotationTol = 1e-9;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw_invalid(std::string(what) + " must be finite");
}

}  // namespace

RotationMatrix RotationMatrix::from_matrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) throw_invalid("rotation matrix has non-finite entries");
  const double ortho = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kRotationTol) throw_invalid("matrix is not orthonormal");
  if (std::abs(m.determinant() - 1.0) > kRotationTol) throw_invalid("matrix determinant is not +1");
  return RotationMatrix(m);
}

RotationMatrix RotationMatrix::operator*(const RotationMatrix& other) const {
  return RotationMatrix(m_ * other.m_);
}

RotationMatrix RotationMatrix::transpose() const { return RotationMatrix(m_.transpose()); }

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) : q_(w, x, y, z) {
  if (!q_.allFinite()) throw_invalid("quaternion has non-finite components");
  const double n = q_.norm();
  if (n == 0.0) throw_invalid("quaternion has zero norm");
  q_ /= n;
  // Settle on a representative whose computed norm is exactly 1, so that
  // distances such as ||q - (-q)|| = 2 come out exact. A couple of
  // re-divisions usually suffice; otherwise step the largest component by ulps.
  for (int pass = 0; pass < 3 && q_.norm() != 1.0; ++pass) q_ /= q_.norm();
  Eigen::Index big = 0;
  q_.cwiseAbs().maxCoeff(&big);
  for (int step = 0; step < 8 && q_.norm() != 1.0; ++step) {
    const double target = q_.norm() > 1.0 ? 0.0 : 2.0 * q_[big];
    q_[big] = std::nextafter(q_[big], target);
  }
}

UnitQuaternion UnitQuaternion::operator-() const {
  UnitQuaternion r;
  r.q_ = -q_;
  return r;
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& b) const {
  const UnitQuaternion& a = *this;
  return UnitQuaternion(a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
                        a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
                        a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
                        a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w());
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

EulerAngles::EulerAngles(double t1, double t2, double t3) {
  require_finite(t1, "euler angle");
  require_finite(t2, "euler angle");
  require_finite(t3, "euler angle");
  t_ = {wrap_angle(t1), wrap_angle(t2), wrap_angle(t3)};
}

RotationMatrix rot_axis(Axis axis, double angle) {
  require_finite(angle, "rotation angle");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d m;
  switch (axis) {
    case Axis::kX:
      m << 1, 0, 0,
           0, c, -s,
           0, s, c;
      break;
    case Axis::kY:
      m << c, 0, s,
           0, 1, 0,
           -s, 0, c;
      break;
    case Axis::kZ:
      m << c, -s, 0,
           s, c, 0,
           0, 0, 1;
      break;
  }
  return RotationMatrix::from_trusted(m);
}

RotationMatrix euler_to_matrix(const EulerAngles& angles) {
  return rot_axis(Axis::kZ, angles[2]) * rot_axis(Axis::kY, angles[1]) * rot_axis(Axis::kX, angles[0]);
}

EulerAngles matrix_to_euler(const RotationMatrix& R) {
  const double t2 = std::atan2(-R(2, 0), std::hypot(R(2, 1), R(2, 2)));
  const double t1 = std::atan2(R(2, 1), R(2, 2));
  const double t3 = std::atan2(R(1, 0), R(0, 0));
  return {t1, t2, t3};
}

UnitQuaternion matrix_to_quat(const RotationMatrix& R) {
  // Shepperd: pivot on the largest of the four squared components.
  const Eigen::Matrix3d& m = R.matrix();
  const double tr = m.trace();
  double w, x, y, z;
  if (tr >= m(0, 0) && tr >= m(1, 1) && tr >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    w = 0.25 * s;
    x = (m(2, 1) - m(1, 2)) / s;
    y = (m(0, 2) - m(2, 0)) / s;
    z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(0, 0) - m(1, 1) - m(2, 2)));
    w = (m(2, 1) - m(1, 2)) / s;
    x = 0.25 * s;
    y = (m(0, 1) + m(1, 0)) / s;
    z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) >= m(2, 2)) {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(1, 1) - m(0, 0) - m(2, 2)));
    w = (m(0, 2) - m(2, 0)) / s;
    x = (m(0, 1) + m(1, 0)) / s;
    y = 0.25 * s;
    z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(2, 2) - m(0, 0) - m(1, 1)));
    w = (m(1, 0) - m(0, 1)) / s;
    x = (m(0, 2) + m(2, 0)) / s;
    y = (m(1, 2) + m(2, 1)) / s;
    z = 0.25 * s;
  }
  const Eigen::Vector4d v(w, x, y, z);
  double sign = 1.0;
  for (int i = 0; i < 4; ++i) {
    if (v[i] != 0.0) {
      sign = v[i] > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  return UnitQuaternion(sign * w, sign * x, sign * y, sign * z);
}

RotationMatrix quat_to_matrix(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  Eigen::Matrix3d m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return RotationMatrix::from_trusted(m);
}

UnitQuaternion quat_from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  require_finite(angle, "rotation angle");
  const double n = axis.norm();
  if (!(n > 0.0) || !axis.allFinite()) throw_invalid("rotation axis must be a finite nonzero vector");
  const Eigen::Vector3d u = axis / n;
  const double s = std::sin(0.5 * angle);
  return UnitQuaternion(std::cos(0.5 * angle), s * u.x(), s * u.y(), s * u.z());
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t) {
  Eigen::Vector4d qa = a.coeffs();
  Eigen::Vector4d qb = b.coeffs();
  double dot = qa.dot(qb);
  if (dot < 0.0) {
    qb = -qb;
    dot = -dot;
  }
  Eigen::Vector4d r;
  if (dot > 1.0 - 1e-12) {
    r = qa + t * (qb - qa);
  } else {
    const double omega = std::acos(std::min(1.0, dot));
    const double so = std::sin(omega);
    r = (std::sin((1.0 - t) * omega) / so) * qa + (std::sin(t * omega) / so) * qb;
  }
  return UnitQuaternion(r[0], r[1], r[2], r[3]);
}

double trace_product(const RotationMatrix& R1, const RotationMatrix& R2) {
  return R1.matrix().cwiseProduct(R2.matrix()).sum();
}

double trace_deficit(const RotationMatrix& R1, const RotationMatrix& R2) {
  // tr(I - R1^T R2) = 0.5 * ||R1 - R2||_F^2, free of cancellation near R1 = R2.
  const double d = 0.5 * (R1.matrix() - R2.matrix()).squaredNorm();
  return std::clamp(d, 0.0, 4.0);
}

double geodesic_distance(const RotationMatrix& R1, const RotationMatrix& R2) {
  const double deficit = trace_deficit(R1, R2);
  const double c = std::clamp(1.0 - 0.5 * deficit, -1.0, 1.0);
  if (c > 0.0) {
    // Same angle as acos(c), via 2 - 2 cos(theta) = 4 sin^2(theta / 2); well conditioned near 0.
    return 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(deficit)));
  }
  return std::acos(c);
}

double view_distance(const RotationMatrix& R1, const RotationMatrix& R2) {
  return std::sqrt(trace_deficit(R1, R2));
}

double quat_distance(const UnitQuaternion& q1, const UnitQuaternion& q2) {
  return 2.0 * (q1.coeffs() - q2.coeffs()).norm();
}

RotationMatrix random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    const double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
    if (w * w + x * x + y * y + z * z > 1e-12) return quat_to_matrix(UnitQuaternion(w, x, y, z));
  }
}

RotationMatrix random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_rotation(rng);
}

}  // namespace viewgp
