#include "viewgp/camsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "viewgp/error.hpp"

namespace viewgp {

namespace {

Eigen::Vector3d catmull_rom(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, const Eigen::Vector3d& p2,
                            const Eigen::Vector3d& p3, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return 0.5 * (2.0 * p1 + (p2 - p0) * s + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s2 +
                (3.0 * p1 - p0 - 3.0 * p2 + p3) * s3);
}

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

}  // namespace

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d K;
  K << fu, 0.0, cu,
       0.0, fv, cv,
       0.0, 0.0, 1.0;
  return K;
}

void CameraIntrinsics::validate() const {
  if (!(std::isfinite(fu) && std::isfinite(fv) && fu > 0.0 && fv > 0.0))
    throw_invalid("focal lengths must be finite and positive");
  if (!(std::isfinite(cu) && std::isfinite(cv))) throw_invalid("principal point must be finite");
}

std::optional<Eigen::Vector2d> project(const CameraIntrinsics& K, const Pose& pose,
                                       const Eigen::Vector3d& world_point) {
  const Eigen::Vector3d c = pose.R.matrix().transpose() * (world_point - pose.p);
  if (c.z() <= 1e-9) return std::nullopt;
  const Eigen::Vector3d h = K.matrix() * c;
  return Eigen::Vector2d(h.x() / h.z(), h.y() / h.z());
}

Trajectory make_trajectory(const TrajectoryConfig& config) {
  const auto& wp = config.waypoints;
  if (wp.size() < 2) throw_invalid("a trajectory needs at least two waypoints");
  for (std::size_t i = 0; i < wp.size(); ++i) {
    if (!std::isfinite(wp[i].time) || !wp[i].pose.p.allFinite()) throw_invalid("waypoints must be finite");
    if (i > 0 && !(wp[i].time > wp[i - 1].time))
      throw_invalid("waypoint timestamps must be strictly increasing");
  }
  const std::size_t segments = wp.size() - 1;
  if (config.frames_per_segment.size() != 1 && config.frames_per_segment.size() != segments)
    throw_invalid("frames_per_segment needs one entry or one per segment");
  if (!(config.rotation_jitter >= 0.0) || !std::isfinite(config.rotation_jitter))
    throw_invalid("rotation jitter must be finite and >= 0");

  std::vector<UnitQuaternion> quats;
  for (const auto& w : wp) quats.push_back(matrix_to_quat(w.pose.R));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto perturbed = [&](const UnitQuaternion& q) {
    if (config.rotation_jitter == 0.0) return quat_to_matrix(q);
    Eigen::Vector3d axis;
    do {
      axis = {normal(rng), normal(rng), normal(rng)};
    } while (axis.norm() < 1e-9);
    const double angle = config.rotation_jitter * uniform(rng);
    return quat_to_matrix(q * quat_from_axis_angle(axis, angle));
  };

  Trajectory out;
  const auto last = static_cast<std::ptrdiff_t>(wp.size()) - 1;
  auto point = [&](std::ptrdiff_t i) -> const Eigen::Vector3d& {
    return wp[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last))].pose.p;
  };
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const int count = config.frames_per_segment.size() == 1 ? config.frames_per_segment[0]
                                                            : config.frames_per_segment[seg];
    if (count < 1) throw_invalid("frames per segment must be >= 1");
    const auto i = static_cast<std::ptrdiff_t>(seg);
    for (int k = 0; k < count; ++k) {
      const double s = static_cast<double>(k) / count;
      Pose pose;
      pose.p = catmull_rom(point(i - 1), point(i), point(i + 1), point(i + 2), s);
      pose.R = perturbed(slerp(quats[seg], quats[seg + 1], smoothstep(s)));
      out.times.push_back(wp[seg].time + s * (wp[seg + 1].time - wp[seg].time));
      out.poses.push_back(pose);
    }
  }
  Pose end = wp.back().pose;
  end.R = perturbed(quats.back());
  out.times.push_back(wp.back().time);
  out.poses.push_back(end);
  return out;
}

TrackDataset synth_tracks(const Trajectory& trajectory, const CameraIntrinsics& K, const SynthConfig& config) {
  K.validate();
  const int length = config.track_length;
  if (length < 2) throw_invalid("track length must be >= 2");
  if (trajectory.size() < static_cast<std::size_t>(length))
    throw_invalid("trajectory is shorter than the track length");
  if (config.num_world_points < 0) throw_invalid("number of world points must be >= 0");
  if (!(config.pixel_noise_sigma >= 0.0)) throw_invalid("pixel noise must be >= 0");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) throw_invalid("test fraction must be in (0, 1)");
  if (config.width < 1 || config.height < 1) throw_invalid("image bounds must be positive");
  if (!(config.box_min.array() <= config.box_max.array()).all()) throw_invalid("sampling box is inverted");

  const int test_count = std::clamp(static_cast<int>(std::lround(config.test_fraction * length)), 1, length - 1);
  const int last_start = static_cast<int>(trajectory.size()) - length;

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> start_dist(0, last_start);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  TrackDataset data;
  data.width = config.width;
  data.height = config.height;
  for (int n = 0; n < config.num_world_points; ++n) {
    const int start = start_dist(rng);
    Eigen::Vector3d local;
    for (int a = 0; a < 3; ++a) local[a] = config.box_min[a] + unit(rng) * (config.box_max[a] - config.box_min[a]);
    const Pose& anchor = trajectory.poses[static_cast<std::size_t>(start)];
    Track track;
    track.world_point = anchor.p + anchor.R.matrix() * local;

    bool keep = true;
    for (int k = 0; k < length; ++k) {
      const int frame = start + k;
      const Pose& pose = trajectory.poses[static_cast<std::size_t>(frame)];
      const auto uv = project(K, pose, track.world_point);
      const double du = config.pixel_noise_sigma * noise(rng);
      const double dv = config.pixel_noise_sigma * noise(rng);
      if (!uv) {
        keep = false;
        continue;
      }
      const double u = uv->x() + du;
      const double v = uv->y() + dv;
      if (u < 0.0 || u >= config.width || v < 0.0 || v >= config.height) keep = false;
      track.points.push_back({frame, pose, u, v, false});
    }

    std::vector<int> order(static_cast<std::size_t>(length));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    if (!keep) continue;
    for (int t = 0; t < test_count; ++t) track.points[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])].test = true;
    track.id = static_cast<int>(data.tracks.size());
    data.tracks.push_back(std::move(track));
  }
  if (data.tracks.empty()) throw Error(ErrorCode::kEmptyResult, "no synthetic track stayed inside the image");
  return data;
}

}  // namespace viewgp
