#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "viewgp/error.hpp"
#include "viewgp/kernels.hpp"

using namespace viewgp;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracles written straight from the closed forms.
double periodic_oracle(double a, double b, double l) {
  const double s = std::sin(0.5 * (a - b));
  return std::exp(-2.0 * s * s / (l * l));
}

double view_oracle(const Eigen::Matrix3d& A, const Eigen::Matrix3d& B, double var, double l) {
  return var * std::exp(-(3.0 - (A.transpose() * B).trace()) / (2.0 * l * l));
}

double min_eig(const Eigen::MatrixXd& K) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

Pose pose(const Eigen::Vector3d& p, const RotationMatrix& R) { return Pose{p, R}; }

}  // namespace

TEST(Translation, Examples) {
  const Eigen::Vector3d p(0.3, -1.0, 2.0);
  EXPECT_EQ(k_translation(p, p, {1.0, 1.0}), 1.0);
  EXPECT_NEAR(k_translation(p, p + Eigen::Vector3d(0.0, 0.6, 0.8), {1.0, 1.0}), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(std::exp(-0.5), 0.6065, 1e-4);
  EXPECT_EQ(k_translation(p, p, {2.0, 0.7}), 2.0);
  EXPECT_NEAR(k_translation(p, Eigen::Vector3d(1, 2, 3), {1.5, 0.8}),
              1.5 * std::exp(-(p - Eigen::Vector3d(1, 2, 3)).squaredNorm() / (2 * 0.64)), 1e-15);
}

TEST(Periodic, Examples) {
  EXPECT_EQ(k_periodic_1d(0.4, 0.4, 1.0), 1.0);
  EXPECT_NEAR(k_periodic_1d(0.4, 0.4 + 2 * kPi, 0.3), 1.0, 1e-12);
  EXPECT_NEAR(k_periodic_1d(0.0, kPi, 1.0), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(k_periodic_1d(0.0, kPi, 1.0), 0.1353, 1e-4);
  EXPECT_NEAR(k_periodic_1d(1.1, -0.4, 0.7), periodic_oracle(1.1, -0.4, 0.7), 1e-15);
}

TEST(SeparableEuler, Examples) {
  const EulerAngles a(0.1, 0.2, 0.3), b(0.4, 0.1, -0.2);
  EXPECT_EQ(k_separable_euler(a, a, {1, 1, 1}), 1.0);
  EXPECT_NEAR(k_separable_euler(a, EulerAngles(0.1, 0.9, 0.3), {0.5, 0.8, 2.0}), k_periodic_1d(0.2, 0.9, 0.8),
              1e-15);
  const double oracle = periodic_oracle(0.1, 0.4, 1) * periodic_oracle(0.2, 0.1, 1) * periodic_oracle(0.3, -0.2, 1);
  EXPECT_NEAR(k_separable_euler(a, b, {1, 1, 1}), oracle, 1e-15);
}

TEST(QuaternionKernel, Examples) {
  const UnitQuaternion q(0.2, 0.4, -0.1, 0.8);
  EXPECT_EQ(k_quat(q, q, 1.7, 0.5), 1.7);
  EXPECT_NEAR(k_quat(q, -q, 1.0, 1.0), std::exp(-8.0), 1e-18);
  EXPECT_NEAR(k_quat(q, -q, 1.0, 1.0), 3.35e-4, 1e-6);
  const auto qi = matrix_to_quat(RotationMatrix::identity());
  const auto qz = matrix_to_quat(rot_axis(Axis::kZ, kPi / 2));
  const double d = 2.0 * std::sqrt(2.0 - std::sqrt(2.0));
  EXPECT_NEAR(k_quat(qi, qz, 1.0, 1.0), std::exp(-d * d / 2.0), 1e-14);
}

TEST(GeodesicKernel, Examples) {
  const auto R = random_rotation(std::uint64_t{5});
  EXPECT_EQ(k_geodesic(R, R, 1.3, 0.4), 1.3);
  EXPECT_NEAR(k_geodesic(RotationMatrix::identity(), rot_axis(Axis::kZ, kPi), 1.0, 1.0), std::exp(-kPi * kPi / 2),
              1e-12);
  EXPECT_NEAR(std::exp(-kPi * kPi / 2), 7.19e-3, 1e-5);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto A = random_rotation(rng), B = random_rotation(rng);
    EXPECT_EQ(k_geodesic(A, B, 1.0, 0.8), k_geodesic(B, A, 1.0, 0.8));
  }
}

TEST(ViewIso, Examples) {
  const auto R = random_rotation(std::uint64_t{6});
  EXPECT_EQ(k_view_iso(R, R, 0.9, 0.3), 0.9);
  for (double t : {0.1, 1.0, 2.5, kPi})
    EXPECT_NEAR(k_view_iso(RotationMatrix::identity(), rot_axis(Axis::kZ, t), 1.0, 0.6), k_periodic_1d(0.0, t, 0.6),
                1e-12);
  const auto R42 = random_rotation(std::uint64_t{42});
  const double dv = view_distance(RotationMatrix::identity(), R42);
  EXPECT_NEAR(k_view_iso(RotationMatrix::identity(), R42, 1.0, 0.5), std::exp(-dv * dv / 0.5), 1e-12);
  EXPECT_NEAR(k_view_iso(RotationMatrix::identity(), R42, 1.0, 0.5),
              view_oracle(Eigen::Matrix3d::Identity(), R42.matrix(), 1.0, 0.5), 1e-12);
}

TEST(ViewIso, OneDimensionalReductionAllAxes) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(-4.0, 4.0), len(0.1, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const Axis a = static_cast<Axis>(i % 3);
    const double t1 = ang(rng), t2 = ang(rng), l = len(rng);
    EXPECT_NEAR(k_view_iso(rot_axis(a, t1), rot_axis(a, t2), 1.0, l), k_periodic_1d(t1, t2, l), 1e-12);
  }
}

TEST(ViewIso, LeftRotationInvariance) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 500; ++i) {
    const auto A = random_rotation(rng), B = random_rotation(rng), Q = random_rotation(rng);
    EXPECT_NEAR(k_view_iso(Q * A, Q * B, 1.0, 0.7), k_view_iso(A, B, 1.0, 0.7), 1e-12);
  }
}

TEST(ViewAniso, IsotropicReduction) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto A = random_rotation(rng), B = random_rotation(rng);
    const double l = 0.2 + 0.001 * i;
    EXPECT_NEAR(k_view_aniso(A, B, 1.4, precision_diagonal({l, l, l})), k_view_iso(A, B, 1.4, l), 1e-12);
  }
}

TEST(ViewAniso, SelfCovarianceAndTraceExpansion) {
  const auto R = random_rotation(std::uint64_t{13});
  EXPECT_EQ(k_view_aniso(R, R, 2.5, Eigen::Vector3d(3.0, 0.2, 7.0)), 2.5);
  const double a = 2.0, b = 0.5, c = 9.0;
  for (double t : {0.3, 1.2, 3.0}) {
    const double expect = std::exp(-0.5 * (a + b) * (1.0 - std::cos(t)));
    EXPECT_NEAR(k_view_aniso(RotationMatrix::identity(), rot_axis(Axis::kZ, t), 1.0, Eigen::Vector3d(a, b, c)),
                expect, 1e-14);
  }
}

TEST(ViewAniso, MatchesDirectTraceOracle) {
  std::mt19937_64 rng(14);
  const Eigen::Vector3d lam(0.5, 2.0, 1.3);
  for (int i = 0; i < 300; ++i) {
    const auto A = random_rotation(rng), B = random_rotation(rng);
    const Eigen::Matrix3d L = lam.asDiagonal();
    const double tr = (L - A.matrix().transpose() * L * B.matrix()).trace();
    EXPECT_NEAR(k_view_aniso(A, B, 1.0, lam), std::exp(-0.5 * tr), 1e-12);
  }
}

TEST(PoseProduct, Examples) {
  const PoseProductParams h{{2.0, 0.9}, ViewIsoParams{1.5, 0.4}};
  const Pose P{Eigen::Vector3d(1, 2, 3), random_rotation(std::uint64_t{3})};
  EXPECT_NEAR(k_pose(P, P, h), 3.0, 1e-15);
  Pose Q = P;
  Q.p += Eigen::Vector3d(0.9, 0.0, 0.0);
  EXPECT_NEAR(k_pose(P, Q, h), 1.5 * 2.0 * std::exp(-0.5), 1e-14);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto poses = testutil::random_poses(2, 100 + i);
    const double oracle = 2.0 * std::exp(-(poses[0].p - poses[1].p).squaredNorm() / (2 * 0.81)) *
                          view_oracle(poses[0].R.matrix(), poses[1].R.matrix(), 1.5, 0.4);
    EXPECT_NEAR(k_pose(poses[0], poses[1], h), oracle, 1e-12);
  }
}

TEST(ObjectView, Examples) {
  const std::vector<double> x{1.0, 0.0, 0.0}, y{0.0, 2.0, 0.0};
  const auto A = random_rotation(std::uint64_t{1}), B = random_rotation(std::uint64_t{2});
  const Eigen::Vector3d lam(1.0, 2.0, 3.0);
  EXPECT_EQ(k_object_view(x, y, A, B, lam, 1.0), 0.0);
  EXPECT_EQ(k_object_view(x, x, A, A, lam, 1.7), 1.7);
  const std::vector<double> u{0.3, -1.2, 0.5}, v{1.1, 0.4, -0.7};
  const double dot = 0.3 * 1.1 - 1.2 * 0.4 - 0.5 * 0.7;
  EXPECT_NEAR(k_object_view(u, v, A, B, lam, 0.8), 0.8 * dot * k_view_aniso(A, B, 1.0, lam), 1e-15);
  const std::vector<double> short_vec{1.0, 2.0};
  EXPECT_THROW(k_object_view(u, short_vec, A, B, lam, 1.0), Error);
}

TEST(ObjectView, GramFromInputs) {
  std::vector<ObjectViewInput> in;
  for (int i = 0; i < 6; ++i) in.push_back({Eigen::VectorXd::Random(4), random_rotation(std::uint64_t(i))});
  const ObjectViewParams h{1.3, {0.5, 1.0, 2.0}};
  const Eigen::MatrixXd K = gram_matrix(h, in, 0.0);
  EXPECT_EQ(K, K.transpose());
  EXPECT_GE(min_eig(K), -1e-8);
  EXPECT_THROW(evaluate(KernelSpec{h}, Pose{}, Pose{}), Error);
}

TEST(LinearExtrinsics, Examples) {
  const Pose P{Eigen::Vector3d(1, 2, 2), random_rotation(std::uint64_t{7})};
  EXPECT_NEAR(k_linear_extrinsics(P, P, 2.0), 2.0 * (9.0 + 3.0), 1e-13);
  EXPECT_NEAR(k_linear_extrinsics(Pose{}, Pose{}, 1.5), 4.5, 1e-15);
  const auto poses = testutil::random_poses(2, 77);
  Eigen::VectorXd f1(12), f2(12);
  f1 << poses[0].p, poses[0].R.matrix().reshaped();
  f2 << poses[1].p, poses[1].R.matrix().reshaped();
  EXPECT_NEAR(k_linear_extrinsics(poses[0], poses[1], 0.7), 0.7 * f1.dot(f2), 1e-13);
}

TEST(Gram, SingleInputAndJitter) {
  const std::vector<Pose> one{Pose{}};
  EXPECT_EQ(gram_matrix(ViewIsoParams{1.0, 1.0}, one)(0, 0), 1.0);
  EXPECT_EQ(gram_matrix(PoseProductParams{{2.0, 1.0}, ViewIsoParams{1.5, 1.0}}, one, 0.25)(0, 0), 3.25);
  EXPECT_THROW(gram_matrix(ViewIsoParams{}, one, -1.0), Error);
}

TEST(Gram, DuplicateInputs) {
  auto poses = testutil::random_poses(4, 5);
  poses.push_back(poses[1]);
  const Eigen::MatrixXd K = gram_matrix(PoseProductParams{}, poses, 0.01);
  EXPECT_EQ(K(1, 4), K(1, 1) - 0.01);
  EXPECT_EQ(K(4, 4), K(1, 1));
}

TEST(Gram, ExactSymmetryAndCrossCovariance) {
  const auto poses = testutil::random_poses(30, 6);
  const KernelSpec spec = PoseProductParams{{1.0, 0.8}, GeodesicParams{1.0, 0.5}};
  const Eigen::MatrixXd K = gram_matrix(spec, poses);
  EXPECT_EQ(K, K.transpose());
  const Eigen::MatrixXd C = cross_covariance(spec, poses, poses);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) EXPECT_EQ(C(i, j), evaluate(spec, poses[i], poses[j]));
  EXPECT_LT((C - K).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Gram, PositiveSemidefiniteFamilies) {
  const std::vector<KernelSpec> families{
      TranslationParams{1.0, 0.7},
      Periodic1DParams{1.0, 0.6, 2},
      SeparableEulerParams{1.0, {0.5, 0.7, 0.9}},
      QuaternionParams{1.0, 0.6},
      ViewIsoParams{1.0, 0.5},
      ViewAnisoParams{1.0, {0.3, 0.8, 1.5}},
      PoseProductParams{{1.0, 0.8}, ViewIsoParams{1.0, 0.5}},
      LinearExtrinsicsParams{1.0},
  };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto poses = testutil::random_poses(50, seed);
    for (const auto& k : families) EXPECT_GE(min_eig(gram_matrix(k, poses)), -1e-8) << display_name(k);
  }
}

TEST(Evaluate, SelfCovarianceIsMagnitude) {
  const auto poses = testutil::random_poses(20, 8);
  const std::vector<KernelSpec> families{
      TranslationParams{1.3, 0.7},       Periodic1DParams{1.3, 0.6, 0},  SeparableEulerParams{1.3, {0.5, 0.7, 0.9}},
      QuaternionParams{1.3, 0.6},        GeodesicParams{1.3, 0.6},       ViewIsoParams{1.3, 0.5},
      ViewAnisoParams{1.3, {0.3, 0.8, 1.5}}, PoseProductParams{{1.3, 0.8}, QuaternionParams{1.0, 0.5}}};
  for (const auto& k : families)
    for (const auto& P : poses) EXPECT_NEAR(evaluate(k, P, P), 1.3, 1e-12) << display_name(k);
}

TEST(Evaluate, PeriodicOnPosesUsesEulerComponent) {
  const Pose a{Eigen::Vector3d::Zero(), euler_to_matrix(EulerAngles(0.2, -0.3, 1.0))};
  const Pose b{Eigen::Vector3d::Ones(), euler_to_matrix(EulerAngles(0.5, 0.1, -0.4))};
  for (int axis = 0; axis < 3; ++axis) {
    const double ta[] = {0.2, -0.3, 1.0}, tb[] = {0.5, 0.1, -0.4};
    EXPECT_NEAR(evaluate(Periodic1DParams{2.0, 0.7, axis}, a, b), 2.0 * periodic_oracle(ta[axis], tb[axis], 0.7),
                1e-12);
  }
}

TEST(KernelSpec, NamesAndParameters) {
  const KernelSpec k = PoseProductParams{{1.0, 2.0}, ViewAnisoParams{1.0, {0.1, 0.2, 0.3}}};
  EXPECT_EQ(family_name(k), "pose_product");
  EXPECT_EQ(display_name(k), "pose_product:view_aniso");
  const auto params = kernel_parameters(k);
  ASSERT_EQ(params.size(), 6u);
  EXPECT_EQ(params[0].first, "translation.variance");
  const KernelSpec changed = with_parameter(k, "orientation.lengthscale_y", 0.9);
  EXPECT_EQ(std::get<ViewAnisoParams>(std::get<PoseProductParams>(changed).orientation).lengthscales[1], 0.9);
  EXPECT_THROW(with_parameter(k, "bogus", 1.0), Error);
  EXPECT_THROW(validate(ViewIsoParams{-1.0, 1.0}), Error);
  EXPECT_THROW(validate(ViewIsoParams{1.0, 0.0}), Error);
  EXPECT_THROW(validate(Periodic1DParams{1.0, 1.0, 3}), Error);
  EXPECT_NO_THROW(validate(k));
}
