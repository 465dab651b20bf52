#include "viewgp/commands.hpp"

#include <set>
#include <sstream>

#include "viewgp/error.hpp"
#include "viewgp/io.hpp"

namespace viewgp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw_invalid("an output directory is required (--out)");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::kIo, "cannot create directory " + dir.string());
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw_invalid(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw_invalid("unknown field '" + key + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw_invalid("field '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

Eigen::Vector3d get_vec3(const json& obj, const char* key, const std::string& where, const Eigen::Vector3d& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = get<std::vector<double>>(obj, key, where, {});
  if (v.size() != 3) throw_invalid("field '" + std::string(key) + "' in " + where + " needs 3 numbers");
  return {v[0], v[1], v[2]};
}

Waypoint parse_waypoint(const json& w, std::size_t i) {
  const std::string where = "waypoint " + std::to_string(i);
  check_keys(w, where, {"time", "position", "euler", "quaternion"});
  if (!w.contains("time")) throw_invalid(where + " needs 'time'");
  if (w.contains("euler") && w.contains("quaternion")) throw_invalid(where + " has both 'euler' and 'quaternion'");
  Waypoint out;
  out.time = get<double>(w, "time", where, 0.0);
  out.pose.p = get_vec3(w, "position", where, Eigen::Vector3d::Zero());
  if (w.contains("euler")) {
    const Eigen::Vector3d e = get_vec3(w, "euler", where, Eigen::Vector3d::Zero());
    out.pose.R = euler_to_matrix(EulerAngles(e[0], e[1], e[2]));
  } else if (w.contains("quaternion")) {
    const auto q = get<std::vector<double>>(w, "quaternion", where, {});
    if (q.size() != 4) throw_invalid(where + ": 'quaternion' needs 4 numbers (w, x, y, z)");
    out.pose.R = quat_to_matrix(UnitQuaternion(q[0], q[1], q[2], q[3]));
  }
  return out;
}

std::vector<KernelSpec> parse_kernel_list(const json& doc) {
  std::vector<KernelSpec> out;
  if (doc.is_array()) {
    for (const auto& k : doc) out.push_back(io::kernel_from_json(k));
  } else {
    out.push_back(io::kernel_from_json(doc));
  }
  if (out.empty()) throw_invalid("kernel list is empty");
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

void cmd_kernel_matrix(const KernelMatrixArgs& args) {
  if (args.out_path.empty()) throw_invalid("an output path is required (--out)");
  const KernelSpec kernel = io::kernel_from_json(io::load_json_argument(args.kernel));
  const auto poses = io::read_poses_csv(args.poses_path);
  if (poses.empty()) throw Error(ErrorCode::kEmptyResult, "pose file has no rows");
  io::write_matrix_csv(args.out_path, gram_matrix(kernel, poses, args.jitter));
}

SynthSetup parse_synth_config(const std::string& json_text, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_invalid(std::string("invalid synth config: ") + e.what());
  }
  check_keys(doc, "synth config", {"seed", "trajectory", "camera", "tracks"});
  SynthSetup s;
  if (!seed_override && !doc.contains("seed")) throw_invalid("synth needs a seed (config 'seed' or --seed)");
  if (doc.contains("seed") && !doc["seed"].is_number_unsigned())
    throw_invalid("'seed' must be a non-negative integer");
  const std::uint64_t seed = seed_override ? *seed_override : get<std::uint64_t>(doc, "seed", "synth config", 0);

  if (!doc.contains("trajectory")) throw_invalid("synth config needs 'trajectory'");
  const json& traj = doc["trajectory"];
  check_keys(traj, "trajectory", {"waypoints", "frames_per_segment", "rotation_jitter"});
  if (!traj.contains("waypoints") || !traj["waypoints"].is_array()) throw_invalid("trajectory needs a 'waypoints' list");
  for (std::size_t i = 0; i < traj["waypoints"].size(); ++i)
    s.trajectory.waypoints.push_back(parse_waypoint(traj["waypoints"][i], i));
  if (traj.contains("frames_per_segment")) {
    if (traj["frames_per_segment"].is_array())
      s.trajectory.frames_per_segment = get<std::vector<int>>(traj, "frames_per_segment", "trajectory", {});
    else
      s.trajectory.frames_per_segment = {get<int>(traj, "frames_per_segment", "trajectory", 10)};
  }
  s.trajectory.rotation_jitter = get<double>(traj, "rotation_jitter", "trajectory", 0.0);
  s.trajectory.seed = seed;

  if (doc.contains("camera")) {
    const json& cam = doc["camera"];
    check_keys(cam, "camera", {"fu", "fv", "cu", "cv", "width", "height"});
    s.camera.fu = get<double>(cam, "fu", "camera", s.camera.fu);
    s.camera.fv = get<double>(cam, "fv", "camera", s.camera.fv);
    s.camera.cu = get<double>(cam, "cu", "camera", s.camera.cu);
    s.camera.cv = get<double>(cam, "cv", "camera", s.camera.cv);
    s.tracks.width = get<int>(cam, "width", "camera", s.tracks.width);
    s.tracks.height = get<int>(cam, "height", "camera", s.tracks.height);
  }
  if (doc.contains("tracks")) {
    const json& t = doc["tracks"];
    check_keys(t, "tracks",
               {"num_world_points", "pixel_noise_sigma", "track_length", "test_fraction", "box_min", "box_max"});
    s.tracks.num_world_points = get<int>(t, "num_world_points", "tracks", s.tracks.num_world_points);
    s.tracks.pixel_noise_sigma = get<double>(t, "pixel_noise_sigma", "tracks", s.tracks.pixel_noise_sigma);
    s.tracks.track_length = get<int>(t, "track_length", "tracks", s.tracks.track_length);
    s.tracks.test_fraction = get<double>(t, "test_fraction", "tracks", s.tracks.test_fraction);
    s.tracks.box_min = get_vec3(t, "box_min", "tracks", s.tracks.box_min);
    s.tracks.box_max = get_vec3(t, "box_max", "tracks", s.tracks.box_max);
  }
  // Separate streams for the trajectory jitter and the track sampling.
  s.tracks.seed = seed + 1;
  return s;
}

SynthSummary cmd_synth(const SynthArgs& args) {
  const SynthSetup setup = parse_synth_config(io::read_text(args.config_path), args.seed);
  const Trajectory trajectory = make_trajectory(setup.trajectory);
  const TrackDataset data = synth_tracks(trajectory, setup.camera, setup.tracks);
  ensure_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  io::write_poses_csv(dir / "trajectory.csv", trajectory.poses);
  io::write_tracks_csv(dir / "tracks.csv", data);
  SynthSummary summary;
  summary.frames = trajectory.size();
  summary.tracks = data.tracks.size();
  for (const auto& t : data.tracks) summary.rows += t.points.size();
  return summary;
}

std::vector<KernelSpec> default_comparison_kernels() {
  auto product = [](OrientationSpec o) { return KernelSpec{PoseProductParams{TranslationParams{}, std::move(o)}}; };
  return {TranslationParams{},
          product(ViewIsoParams{}),
          product(QuaternionParams{}),
          product(GeodesicParams{}),
          product(SeparableEulerParams{}),
          LinearExtrinsicsParams{}};
}

std::string cmd_track_experiment(const TrackExperimentArgs& args) {
  TrackExperimentConfig config;
  config.kernels = args.kernels.empty() ? default_comparison_kernels()
                                        : parse_kernel_list(io::load_json_argument(args.kernels));
  config.hyper = parse_hyper_mode(args.hyper);
  config.noise_variance = args.noise_variance;
  config.optimizer = args.optimizer;
  config.jitter = args.jitter;
  config.seed = args.seed;
  if (!(args.noise_variance > 0.0)) throw_invalid("noise variance must be > 0");

  const auto poses = io::read_poses_csv(args.poses_path);
  const TrackDataset data = io::read_tracks_csv(args.tracks_path, poses);
  const ExperimentReport report = run_track_experiment(data, config);

  ensure_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  const std::string text = io::report_to_text(report);
  io::write_text(dir / "report.json", io::report_to_json(report).dump(2) + "\n");
  io::write_text(dir / "report.txt", text);
  return text;
}

InterpResult cmd_interp(const InterpArgs& args) {
  const InterpMode mode = parse_interp_mode(args.mode);
  const KernelSpec kernel = args.kernel.empty()
                                ? KernelSpec{ViewIsoParams{ViewPreset::kVariance, ViewPreset::kLengthscale}}
                                : io::kernel_from_json(io::load_json_argument(args.kernel));
  if (std::holds_alternative<ObjectViewParams>(kernel)) throw_invalid("object_view is not a pose kernel");

  LatentSequence seq;
  if (args.synthetic) {
    if (!args.seed) throw_invalid("synthetic interpolation needs --seed");
    if (!args.codes_path.empty()) throw_invalid("--codes cannot be combined with --synthetic");
    const std::vector<Pose> poses =
        args.poses_path.empty() ? sweep_trajectory(args.frames).poses : io::read_poses_csv(args.poses_path);
    LatentConfig lc;
    lc.dim = args.dim;
    lc.variance = args.gen_variance;
    lc.lengthscale = args.gen_lengthscale;
    lc.noise_variance = args.noise_variance;
    lc.seed = *args.seed;
    seq = make_latent_sequence(poses, lc);
  } else {
    if (args.poses_path.empty() || args.codes_path.empty())
      throw_invalid("interp needs --poses and --codes, or --synthetic");
    seq.poses = io::read_poses_csv(args.poses_path);
    seq.codes = io::read_codes_csv(args.codes_path);
    if (seq.codes.rows() != static_cast<Eigen::Index>(seq.poses.size())) {
      std::ostringstream msg;
      msg << "shape mismatch: " << seq.poses.size() << " poses but " << seq.codes.rows() << " code rows";
      throw_invalid(msg.str());
    }
    seq.truth = seq.codes;
    seq.noise_variance = args.noise_variance;
  }

  const InterpResult result = run_interp_experiment(seq, mode, kernel, args.noise_variance, args.jitter);

  ensure_dir(args.out_dir);
  const fs::path dir(args.out_dir);
  if (args.synthetic) {
    io::write_poses_csv(dir / "poses.csv", seq.poses);
    io::write_codes_csv(dir / "codes.csv", seq.codes);
  }
  {
    std::ostringstream out;
    out << "frame";
    for (Eigen::Index j = 0; j < result.mean.cols(); ++j) out << ",m" << j;
    out << ",std\n";
    for (Eigen::Index i = 0; i < result.mean.rows(); ++i) {
      out << i;
      for (Eigen::Index j = 0; j < result.mean.cols(); ++j) out << ',' << io::format_double(result.mean(i, j));
      out << ',' << io::format_double(result.posterior_std[i]) << '\n';
    }
    io::write_text(dir / "predictions.csv", out.str());
  }
  Eigen::Index max_std_frame = 0;
  result.posterior_std.maxCoeff(&max_std_frame);
  json report = {{"mode", interp_mode_name(mode)},
                 {"kernel", io::kernel_to_json(kernel)},
                 {"noise_variance", args.noise_variance},
                 {"synthetic", args.synthetic},
                 {"seed", args.seed ? json(*args.seed) : json(nullptr)},
                 {"frames", seq.poses.size()},
                 {"dim", seq.codes.cols()},
                 {"mean_mse", result.mean_mse},
                 {"max_std_frame", max_std_frame},
                 {"frame_mse", vector_json(result.frame_mse)},
                 {"posterior_std", vector_json(result.posterior_std)}};
  io::write_text(dir / "report.json", report.dump(2) + "\n");
  return result;
}

void cmd_figures(const FiguresArgs& args) {
  std::vector<Pose> poses;
  if (!args.poses_path.empty()) poses = io::read_poses_csv(args.poses_path);
  const FigureSet set = emit_distance_figures(args.grid);
  ensure_dir(args.out_dir);
  const fs::path dir(args.out_dir);

  for (const auto& fig : set.figures) {
    const std::string name = measure_name(fig.measure);
    io::write_matrix_csv(dir / (name + "_distance.csv"), fig.distance);
    io::write_pgm(dir / (name + "_distance.pgm"), fig.distance);
    io::write_matrix_csv(dir / (name + "_covariance.csv"), fig.covariance);
    io::write_pgm(dir / (name + "_covariance.pgm"), fig.covariance);
  }
  std::ostringstream slices;
  slices << "angle";
  for (const auto& fig : set.figures) {
    const std::string n = measure_name(fig.measure);
    slices << ',' << n << "_diagonal," << n << "_theta2_zero," << n << "_cov_diagonal," << n << "_cov_theta2_zero";
  }
  slices << '\n';
  for (Eigen::Index i = 0; i < set.angles.size(); ++i) {
    slices << io::format_double(set.angles[i]);
    for (const auto& fig : set.figures)
      for (const Eigen::VectorXd* v : {&fig.diagonal_slice, &fig.theta2_zero_slice, &fig.diagonal_covariance_slice,
                                       &fig.theta2_zero_covariance_slice})
        slices << ',' << io::format_double((*v)[i]);
    slices << '\n';
  }
  io::write_text(dir / "slices.csv", slices.str());

  if (!poses.empty()) {
    auto [translation, orientation] =
        trajectory_covariances(poses, args.translation_lengthscale, args.view_lengthscale);
    if (args.jitter < 0.0) throw_invalid("jitter must be >= 0");
    translation.diagonal().array() += args.jitter;
    orientation.diagonal().array() += args.jitter;
    io::write_matrix_csv(dir / "translation_cov.csv", translation);
    io::write_pgm(dir / "translation_cov.pgm", translation);
    io::write_matrix_csv(dir / "orientation_cov.csv", orientation);
    io::write_pgm(dir / "orientation_cov.pgm", orientation);
  }
}

}  // namespace viewgp::cli
