#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "viewgp/so3.hpp"

namespace viewgp {

/// Zero-skew pinhole intrinsics, pixels.
struct CameraIntrinsics {
  double fu = 500.0;
  double fv = 500.0;
  double cu = 320.0;
  double cv = 240.0;

  Eigen::Matrix3d matrix() const;
  void validate() const;
};

/// Pixel coordinates of `world_point`, or nullopt when it lies at or behind
/// the image plane (camera-frame depth <= 1e-9). The camera looks along +z.
std::optional<Eigen::Vector2d> project(const CameraIntrinsics& K, const Pose& pose,
                                       const Eigen::Vector3d& world_point);

struct Waypoint {
  double time = 0.0;
  Pose pose;
};

struct TrajectoryConfig {
  std::vector<Waypoint> waypoints;
  /// Frames generated per segment (the final waypoint adds one more frame).
  /// A single entry applies to every segment.
  std::vector<int> frames_per_segment{10};
  /// Maximum angle (radians) of the random per-frame orientation perturbation.
  double rotation_jitter = 0.0;
  std::uint64_t seed = 0;
};

struct Trajectory {
  std::vector<double> times;  // strictly increasing
  std::vector<Pose> poses;

  std::size_t size() const { return poses.size(); }
};

/// Catmull-Rom positions through the waypoints; orientations slerped with a
/// smoothstep time warp inside each segment.
Trajectory make_trajectory(const TrajectoryConfig& config);

struct TrackPoint {
  int frame = 0;
  Pose pose;
  double u = 0.0;
  double v = 0.0;
  bool test = false;
};

struct Track {
  int id = 0;
  Eigen::Vector3d world_point = Eigen::Vector3d::Zero();
  std::vector<TrackPoint> points;
};

struct TrackDataset {
  std::vector<Track> tracks;
  int width = 640;
  int height = 480;
};

struct SynthConfig {
  int num_world_points = 200;
  double pixel_noise_sigma = 1.0;
  int track_length = 20;
  double test_fraction = 0.15;
  int width = 640;
  int height = 480;
  /// Sampling box for world points, expressed in the frame of the camera at
  /// the first frame of each track.
  Eigen::Vector3d box_min{-3.0, -2.0, 4.0};
  Eigen::Vector3d box_max{3.0, 2.0, 10.0};
  std::uint64_t seed = 0;
};

/// Projects random fixed world points through windows of consecutive frames.
/// Tracks that leave the image or pass behind the camera are dropped. Each
/// surviving track gets max(1, round(test_fraction * length)) test points.
/// Throws kEmptyResult when no track survives.
TrackDataset synth_tracks(const Trajectory& trajectory, const CameraIntrinsics& K, const SynthConfig& config);

}  // namespace viewgp
