#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "viewgp/camsim.hpp"
#include "viewgp/error.hpp"

using namespace viewgp;

namespace {

constexpr double kPi = std::numbers::pi;

Pose pose_at(double x, double y, double z, const Eigen::Matrix3d& R = Eigen::Matrix3d::Identity()) {
  return Pose{Eigen::Vector3d(x, y, z), RotationMatrix::from_matrix(R)};
}

TrajectoryConfig two_waypoints(const Pose& a, const Pose& b, int frames) {
  TrajectoryConfig c;
  c.waypoints = {{0.0, a}, {1.0, b}};
  c.frames_per_segment = {frames};
  return c;
}

Trajectory walking(int frames, std::uint64_t seed, double jitter = 0.0) {
  TrajectoryConfig c;
  c.waypoints = {{0.0, pose_at(0, 0, 0)},
                 {1.0, pose_at(0.5, 0, 0.3, testutil::ry(0.3))},
                 {2.0, pose_at(1.0, 0.1, 0.5, testutil::ry(0.1) * testutil::rx(0.1))}};
  c.frames_per_segment = {frames / 2};
  c.rotation_jitter = jitter;
  c.seed = seed;
  return make_trajectory(c);
}

}  // namespace

TEST(Project, OpticalAxisAndSimilarTriangles) {
  CameraIntrinsics K;
  K.fu = K.fv = 400.0;
  K.cu = 300.0;
  K.cv = 200.0;
  const auto c = project(K, Pose{}, Eigen::Vector3d(0, 0, 1));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->x(), 300.0);
  EXPECT_EQ(c->y(), 200.0);
  const auto s = project(K, Pose{}, Eigen::Vector3d(0.5, 0, 2));
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->x(), 400.0 * 0.5 / 2 + 300.0);
  EXPECT_DOUBLE_EQ(s->y(), 200.0);
}

TEST(Project, BehindCameraIsFlagged) {
  const CameraIntrinsics K;
  EXPECT_FALSE(project(K, Pose{}, Eigen::Vector3d(0, 0, -1)));
  EXPECT_FALSE(project(K, Pose{}, Eigen::Vector3d(1, 1, 0)));
  EXPECT_FALSE(project(K, Pose{}, Eigen::Vector3d(0, 0, 1e-10)));
  EXPECT_TRUE(project(K, Pose{}, Eigen::Vector3d(0, 0, 1e-8)));
}

TEST(Project, HomogeneousMatrixOracle) {
  CameraIntrinsics K;
  K.fu = 480;
  K.fv = 520;
  K.cu = 310;
  K.cv = 250;
  Eigen::Matrix3d Km;
  Km << 480, 0, 310, 0, 520, 250, 0, 0, 1;
  const auto poses = testutil::random_poses(200, 5);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 3.0);
  int checked = 0;
  for (const auto& P : poses) {
    const Eigen::Vector4d w(n(rng), n(rng), n(rng), 1.0);
    Eigen::Matrix<double, 3, 4> E;
    E.leftCols<3>() = P.R.matrix().transpose();
    E.col(3) = -P.R.matrix().transpose() * P.p;
    const Eigen::Vector3d h = Km * E * w;
    const auto uv = project(K, P, w.head<3>());
    const Eigen::Vector3d cam = E * w;
    if (cam.z() <= 1e-9) {
      EXPECT_FALSE(uv);
      continue;
    }
    ASSERT_TRUE(uv);
    EXPECT_NEAR(uv->x(), h.x() / h.z(), 1e-9 * std::max(1.0, std::abs(uv->x())));
    EXPECT_NEAR(uv->y(), h.y() / h.z(), 1e-9 * std::max(1.0, std::abs(uv->y())));
    // Scaling the homogeneous world vector leaves the pixel unchanged.
    const Eigen::Vector3d h2 = Km * E * (3.7 * w);
    EXPECT_NEAR(h2.x() / h2.z(), uv->x(), 1e-9 * std::max(1.0, std::abs(uv->x())));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Intrinsics, Validation) {
  CameraIntrinsics K;
  EXPECT_NO_THROW(K.validate());
  K.fu = 0.0;
  EXPECT_THROW(K.validate(), Error);
  K.fu = 500.0;
  K.cv = std::nan("");
  EXPECT_THROW(K.validate(), Error);
}

TEST(Trajectory, IdenticalWaypointsAreConstant) {
  const Pose P = pose_at(1, 2, 3, testutil::rz(0.4) * testutil::rx(0.2));
  const Trajectory t = make_trajectory(two_waypoints(P, P, 12));
  ASSERT_EQ(t.size(), 13u);
  for (const auto& q : t.poses) {
    EXPECT_LT((q.p - P.p).norm(), 1e-12);
    EXPECT_LT((q.R.matrix() - P.R.matrix()).norm(), 1e-12);
  }
}

TEST(Trajectory, SmoothstepMidpointIsHalfAngle) {
  const Trajectory t = make_trajectory(two_waypoints(Pose{}, pose_at(0, 0, 0, testutil::rz(kPi / 2)), 10));
  ASSERT_EQ(t.size(), 11u);
  EXPECT_NEAR(geodesic_distance(t.poses[0].R, t.poses[5].R), kPi / 4, 1e-12);
  // Standstill at the ends: the first step is much smaller than the middle step.
  const double first = geodesic_distance(t.poses[0].R, t.poses[1].R);
  const double middle = geodesic_distance(t.poses[5].R, t.poses[6].R);
  EXPECT_LT(first, 0.25 * middle);
  // Slerp oracle: rotation about z by (pi/2) * smoothstep(s).
  for (int k = 0; k <= 10; ++k) {
    const double s = k / 10.0;
    const double a = 0.5 * kPi * s * s * (3 - 2 * s);
    EXPECT_LT((t.poses[k].R.matrix() - testutil::rz(a)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Trajectory, PassesThroughWaypointsAndTimesIncrease) {
  TrajectoryConfig c;
  c.waypoints = {{0.0, pose_at(0, 0, 0)}, {1.0, pose_at(1, 0, 0)}, {3.0, pose_at(1, 2, 0)}, {4.0, pose_at(0, 2, 1)}};
  c.frames_per_segment = {4, 8, 3};
  const Trajectory t = make_trajectory(c);
  ASSERT_EQ(t.size(), 16u);
  EXPECT_LT((t.poses[0].p - c.waypoints[0].pose.p).norm(), 1e-12);
  EXPECT_LT((t.poses[4].p - c.waypoints[1].pose.p).norm(), 1e-12);
  EXPECT_LT((t.poses[12].p - c.waypoints[2].pose.p).norm(), 1e-12);
  EXPECT_LT((t.poses[15].p - c.waypoints[3].pose.p).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(t.times[12], 3.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_GT(t.times[i], t.times[i - 1]);
}

TEST(Trajectory, JitterKeepsRotationsValidAndBounded) {
  const Trajectory clean = walking(40, 1);
  const Trajectory noisy = walking(40, 1, 0.05);
  ASSERT_EQ(clean.size(), noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const Eigen::Matrix3d R = noisy.poses[i].R.matrix();
    EXPECT_LT((R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-9);
    EXPECT_LE(geodesic_distance(clean.poses[i].R, noisy.poses[i].R), 0.05 + 1e-9);
    EXPECT_NO_THROW(RotationMatrix::from_matrix(R));
  }
  const Trajectory again = walking(40, 1, 0.05);
  for (std::size_t i = 0; i < noisy.size(); ++i) EXPECT_EQ(noisy.poses[i].R.matrix(), again.poses[i].R.matrix());
}

TEST(Trajectory, RejectsBadConfigs) {
  TrajectoryConfig c = two_waypoints(Pose{}, Pose{}, 5);
  c.waypoints[1].time = 0.0;
  EXPECT_THROW(make_trajectory(c), Error);
  c = two_waypoints(Pose{}, Pose{}, 5);
  c.waypoints.pop_back();
  EXPECT_THROW(make_trajectory(c), Error);
  c = two_waypoints(Pose{}, Pose{}, 0);
  EXPECT_THROW(make_trajectory(c), Error);
  c = two_waypoints(Pose{}, Pose{}, 5);
  c.frames_per_segment = {2, 3};
  EXPECT_THROW(make_trajectory(c), Error);
  c = two_waypoints(Pose{}, Pose{}, 5);
  c.rotation_jitter = -0.1;
  EXPECT_THROW(make_trajectory(c), Error);
}

TEST(Synth, NoiselessStaticTracksAreConstant) {
  const Trajectory t = make_trajectory(two_waypoints(Pose{}, Pose{}, 30));
  SynthConfig cfg;
  cfg.pixel_noise_sigma = 0.0;
  cfg.num_world_points = 50;
  cfg.seed = 3;
  const TrackDataset data = synth_tracks(t, CameraIntrinsics{}, cfg);
  ASSERT_FALSE(data.tracks.empty());
  for (const auto& tr : data.tracks) {
    ASSERT_EQ(tr.points.size(), 20u);
    for (const auto& pt : tr.points) {
      EXPECT_EQ(pt.u, tr.points[0].u);
      EXPECT_EQ(pt.v, tr.points[0].v);
    }
  }
}

TEST(Synth, NoiselessTracksMatchProjection) {
  const Trajectory t = walking(60, 2);
  SynthConfig cfg;
  cfg.pixel_noise_sigma = 0.0;
  cfg.seed = 4;
  const CameraIntrinsics K;
  const TrackDataset data = synth_tracks(t, K, cfg);
  ASSERT_FALSE(data.tracks.empty());
  for (const auto& tr : data.tracks)
    for (const auto& pt : tr.points) {
      const auto uv = project(K, t.poses[static_cast<std::size_t>(pt.frame)], tr.world_point);
      ASSERT_TRUE(uv);
      EXPECT_EQ(pt.u, uv->x());
      EXPECT_EQ(pt.v, uv->y());
    }
}

TEST(Synth, Invariants) {
  const Trajectory t = walking(60, 5, 0.01);
  SynthConfig cfg;
  cfg.seed = 8;
  cfg.num_world_points = 300;
  const TrackDataset data = synth_tracks(t, CameraIntrinsics{}, cfg);
  ASSERT_GT(data.tracks.size(), 10u);
  EXPECT_EQ(data.width, 640);
  EXPECT_EQ(data.height, 480);
  for (std::size_t i = 0; i < data.tracks.size(); ++i) {
    const auto& tr = data.tracks[i];
    EXPECT_EQ(tr.id, static_cast<int>(i));
    ASSERT_EQ(tr.points.size(), 20u);
    int tests = 0;
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const auto& pt = tr.points[k];
      EXPECT_GE(pt.u, 0.0);
      EXPECT_LT(pt.u, 640.0);
      EXPECT_GE(pt.v, 0.0);
      EXPECT_LT(pt.v, 480.0);
      EXPECT_EQ(pt.frame, tr.points[0].frame + static_cast<int>(k));
      EXPECT_EQ(pt.pose.R.matrix(), t.poses[static_cast<std::size_t>(pt.frame)].R.matrix());
      tests += pt.test ? 1 : 0;
    }
    EXPECT_EQ(tests, 3);  // round(0.15 * 20)
  }
}

TEST(Synth, SameSeedIsBitIdentical) {
  const Trajectory t = walking(50, 9, 0.02);
  SynthConfig cfg;
  cfg.seed = 77;
  const TrackDataset a = synth_tracks(t, CameraIntrinsics{}, cfg);
  const TrackDataset b = synth_tracks(t, CameraIntrinsics{}, cfg);
  ASSERT_EQ(a.tracks.size(), b.tracks.size());
  for (std::size_t i = 0; i < a.tracks.size(); ++i) {
    EXPECT_EQ(a.tracks[i].world_point, b.tracks[i].world_point);
    for (std::size_t k = 0; k < a.tracks[i].points.size(); ++k) {
      EXPECT_EQ(a.tracks[i].points[k].u, b.tracks[i].points[k].u);
      EXPECT_EQ(a.tracks[i].points[k].v, b.tracks[i].points[k].v);
      EXPECT_EQ(a.tracks[i].points[k].test, b.tracks[i].points[k].test);
    }
  }
  cfg.seed = 78;
  const TrackDataset c = synth_tracks(t, CameraIntrinsics{}, cfg);
  EXPECT_NE(a.tracks[0].points[0].u, c.tracks[0].points[0].u);
}

TEST(Synth, ErrorsAndEmptyResult) {
  const Trajectory t = walking(30, 1);
  SynthConfig cfg;
  cfg.track_length = 40;
  EXPECT_THROW(synth_tracks(t, CameraIntrinsics{}, cfg), Error);
  cfg = SynthConfig{};
  cfg.test_fraction = 1.0;
  EXPECT_THROW(synth_tracks(t, CameraIntrinsics{}, cfg), Error);
  cfg = SynthConfig{};
  cfg.box_min = {0, 0, -10};
  cfg.box_max = {0, 0, -5};  // always behind the camera
  try {
    synth_tracks(t, CameraIntrinsics{}, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyResult);
    EXPECT_EQ(exit_code(e.code()), 4);
  }
}
